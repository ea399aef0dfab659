#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gdf/errors.hpp"
#include "gdf/logstore.hpp"

using namespace gdf;

namespace {

TransferLogRecord sample_record(double ts = 100.0, const std::string& id = "tr1") {
  TransferLogRecord r;
  r.transfer_id = id;
  r.timestamp = ts;
  r.interval = 1;
  r.rtt = 0.04;
  r.bandwidth = 10000000000;
  r.queuing_delay = 0.043;
  r.packet_loss_rate = 0.0025;
  r.params = ParamSet{4, 2, 4, 33554432};
  r.dataset = DatasetInfo{200000000000, 2000, 1e8};
  r.utilization.cpu = 0.41;
  r.utilization.mem = 0.12;
  r.utilization.disk_reads = 812.5;
  r.utilization.disk_writes = 812.5;
  r.utilization.disk_bytes_read = 5.3e8;
  r.utilization.disk_bytes_written = 5.3e8;
  r.utilization.net_bytes_sent = 5.3e8;
  r.utilization.net_bytes_received = 1.06e7;
  r.utilization.pkts_sent = 353333.1;
  r.utilization.pkts_received = 176666.6;
  r.achieved_throughput = 4.24e9;
  r.measured_power = 131.7;
  return r;
}

std::string swap_field(std::string line, const std::string& key,
                       const std::string& value) {
  const auto at = line.find(" " + key + "=");
  REQUIRE(at != std::string::npos);
  const auto start = at + key.size() + 2;
  auto end = line.find(' ', start);
  if (end == std::string::npos) end = line.size();
  return line.replace(start, end - start, value);
}

}  // namespace

TEST_CASE("log line round-trip is exact") {
  TransferLogRecord r = sample_record();
  r.achieved_throughput = 4240000000.000001;  // needs full precision
  const std::string line = format_line(r);
  TransferLogRecord back = parse_line(line, 1);
  CHECK(format_line(back) == line);
  CHECK(back.transfer_id == r.transfer_id);
  CHECK(back.timestamp == r.timestamp);
  CHECK(back.params == r.params);
  CHECK(back.achieved_throughput == r.achieved_throughput);
  CHECK(back.utilization.pkts_sent == r.utilization.pkts_sent);
}

TEST_CASE("missing values survive as NaN") {
  TransferLogRecord r = sample_record();
  r.utilization.cpu = std::nan("");
  const std::string line = format_line(r);
  TransferLogRecord back = parse_line(line, 1);
  CHECK(std::isnan(back.utilization.cpu));
  CHECK(format_line(back) == line);
}

TEST_CASE("parse_line rejects malformed input with the line number") {
  const std::string line = format_line(sample_record());
  CHECK_THROWS_AS(parse_line("not a log line", 7), ParseError);
  CHECK_THROWS_AS(parse_line(swap_field(line, "plr", "1.5"), 3), ParseError);
  CHECK_THROWS_AS(parse_line(swap_field(line, "rtt", "-1"), 3), ParseError);
  CHECK_THROWS_AS(parse_line(swap_field(line, "cc", "0"), 3), ParseError);
  try {
    parse_line("garbage", 42);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 42);
  }
}

TEST_CASE("ingest skips comments, sorts, and rejects duplicates") {
  std::stringstream ss;
  ss << "# header comment\n\n";
  ss << format_line(sample_record(102, "b")) << "\n";
  ss << format_line(sample_record(101, "a")) << "\n";
  ss << format_line(sample_record(100, "b")) << "\n";
  LogBatch batch = ingest_stream(ss, "test");
  REQUIRE(batch.records.size() == 3);
  CHECK(batch.records[0].transfer_id == "a");
  CHECK(batch.records[1].timestamp == 100);
  CHECK(batch.records[2].timestamp == 102);

  std::stringstream dup;
  dup << format_line(sample_record(100, "a")) << "\n";
  dup << format_line(sample_record(100, "a")) << "\n";
  CHECK_THROWS_AS(ingest_stream(dup, "test"), ParseError);

  std::stringstream empty("\n# only comments\n");
  CHECK_THROWS_AS(ingest_stream(empty, "test"), EmptyBatch);
}

TEST_CASE("save/ingest stream round-trip") {
  LogBatch batch;
  batch.provenance = "test";
  batch.records.push_back(sample_record(100, "a"));
  batch.records.push_back(sample_record(101, "a"));
  std::stringstream ss;
  save_stream(batch, ss);
  LogBatch back = ingest_stream(ss, "test");
  REQUIRE(back.records.size() == 2);
  CHECK(format_line(back.records[0]) == format_line(batch.records[0]));
  CHECK(format_line(back.records[1]) == format_line(batch.records[1]));
}

TEST_CASE("clean caps impossible throughput and flags it") {
  LogBatch batch;
  TransferLogRecord r = sample_record();
  r.achieved_throughput = 2e10;  // above the 1e10 link
  batch.records.push_back(r);
  LogBatch out = clean(batch, 1e10);
  CHECK(out.records[0].achieved_throughput == 1e10);
  CHECK(out.records[0].capped);
}

TEST_CASE("clean interpolates interior gaps and extends edges") {
  LogBatch batch;
  for (int i = 0; i < 5; ++i) {
    TransferLogRecord r = sample_record(100.0 + i);
    r.utilization.cpu = 0.2 + 0.1 * i;
    batch.records.push_back(r);
  }
  batch.records[0].utilization.cpu = std::nan("");  // leading edge
  batch.records[2].utilization.cpu = std::nan("");  // interior
  batch.records[4].measured_power = std::nan("");   // trailing edge

  LogBatch out = clean(batch, 1e10);
  CHECK(out.records[0].utilization.cpu == doctest::Approx(0.3));  // nearest valid
  CHECK(out.records[2].utilization.cpu == doctest::Approx(0.4));  // midpoint
  CHECK(out.records[4].measured_power == doctest::Approx(131.7));

  // Idempotence: cleaning a clean batch changes nothing.
  LogBatch again = clean(out, 1e10);
  for (size_t i = 0; i < out.records.size(); ++i)
    CHECK(format_line(again.records[i]) == format_line(out.records[i]));
}

TEST_CASE("clean needs at least one valid sample per field") {
  LogBatch batch;
  for (int i = 0; i < 3; ++i) {
    TransferLogRecord r = sample_record(100.0 + i);
    r.utilization.mem = std::nan("");
    batch.records.push_back(r);
  }
  CHECK_THROWS_AS(clean(batch, 1e10), AllMissing);
}
