#include "gdf/logstore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gdf/errors.hpp"

namespace gdf {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, ptr};
}

// One entry per interpolatable float field of a record.
struct FloatField {
  const char* name;
  double TransferLogRecord::* ptr;
};

struct UtilField {
  const char* name;
  double Utilization::* ptr;
};

constexpr FloatField kRecordFloats[] = {
    {"iv", &TransferLogRecord::interval},
    {"rtt", &TransferLogRecord::rtt},
    {"qd", &TransferLogRecord::queuing_delay},
    {"plr", &TransferLogRecord::packet_loss_rate},
    {"thr", &TransferLogRecord::achieved_throughput},
    {"pw", &TransferLogRecord::measured_power},
};

constexpr UtilField kUtilFloats[] = {
    {"cpu", &Utilization::cpu},
    {"mem", &Utilization::mem},
    {"dr", &Utilization::disk_reads},
    {"dw", &Utilization::disk_writes},
    {"dbr", &Utilization::disk_bytes_read},
    {"dbw", &Utilization::disk_bytes_written},
    {"nbs", &Utilization::net_bytes_sent},
    {"nbr", &Utilization::net_bytes_received},
    {"ps", &Utilization::pkts_sent},
    {"pr", &Utilization::pkts_received},
};

class FieldReader {
 public:
  FieldReader(const std::string& line, size_t line_no) : in_(line), line_no_(line_no) {}

  std::string token(const char* key) {
    std::string tok;
    if (!(in_ >> tok)) throw ParseError(line_no_, std::string("missing field ") + key);
    const std::string prefix = std::string(key) + "=";
    if (tok.rfind(prefix, 0) != 0)
      throw ParseError(line_no_, "expected '" + prefix + "...', got '" + tok + "'");
    return tok.substr(prefix.size());
  }

  double num(const char* key) {
    std::string v = token(key);
    if (v == "nan") return std::nan("");
    double out;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ParseError(line_no_, std::string("bad number for ") + key + ": '" + v + "'");
    return out;
  }

  int64_t integer(const char* key) {
    std::string v = token(key);
    int64_t out;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ParseError(line_no_, std::string("bad integer for ") + key + ": '" + v + "'");
    return out;
  }

  size_t line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  size_t line_no_;
};

void validate(const TransferLogRecord& r, size_t line_no) {
  auto fail = [&](const std::string& what) { throw ParseError(line_no, what); };
  if (r.transfer_id.empty()) fail("empty transfer id");
  if (!std::isfinite(r.timestamp)) fail("timestamp must be finite");
  if (!std::isnan(r.interval) && r.interval <= 0) fail("interval must be > 0");
  if (!std::isnan(r.rtt) && r.rtt <= 0) fail("rtt must be > 0");
  if (r.bandwidth <= 0) fail("bandwidth must be > 0");
  if (!std::isnan(r.packet_loss_rate) &&
      (r.packet_loss_rate < 0 || r.packet_loss_rate > 1))
    fail("packet_loss_rate outside [0,1]");
  if (!r.params.valid()) fail("parameters violate cc,p,pp >= 1, bs > 0");
  if (r.dataset.total_bytes < 0 || r.dataset.file_count < 0) fail("negative dataset size");
  if (!std::isnan(r.utilization.cpu) && (r.utilization.cpu < 0 || r.utilization.cpu > 1))
    fail("cpu outside [0,1]");
  if (!std::isnan(r.utilization.mem) && (r.utilization.mem < 0 || r.utilization.mem > 1))
    fail("mem outside [0,1]");
  if (!std::isnan(r.achieved_throughput) && r.achieved_throughput < 0)
    fail("negative throughput");
}

}  // namespace

std::string format_line(const TransferLogRecord& r) {
  std::string out;
  out.reserve(256);
  auto kv = [&out](const char* k, const std::string& v) {
    if (!out.empty()) out += ' ';
    out += k;
    out += '=';
    out += v;
  };
  kv("ts", fmt_double(r.timestamp));
  kv("id", r.transfer_id);
  kv("iv", fmt_double(r.interval));
  kv("rtt", fmt_double(r.rtt));
  kv("bw", std::to_string(r.bandwidth));
  kv("bs", std::to_string(r.params.bs));
  kv("qd", fmt_double(r.queuing_delay));
  kv("plr", fmt_double(r.packet_loss_rate));
  kv("cc", std::to_string(r.params.cc));
  kv("p", std::to_string(r.params.p));
  kv("pp", std::to_string(r.params.pp));
  kv("bytes", std::to_string(r.dataset.total_bytes));
  kv("files", std::to_string(r.dataset.file_count));
  kv("mfb", fmt_double(r.dataset.mean_file_bytes));
  for (const auto& f : kUtilFloats) kv(f.name, fmt_double(r.utilization.*(f.ptr)));
  kv("thr", fmt_double(r.achieved_throughput));
  kv("pw", fmt_double(r.measured_power));
  return out;
}

TransferLogRecord parse_line(const std::string& line, size_t line_no) {
  FieldReader f(line, line_no);
  TransferLogRecord r;
  r.timestamp = f.num("ts");
  r.transfer_id = f.token("id");
  r.interval = f.num("iv");
  r.rtt = f.num("rtt");
  r.bandwidth = f.integer("bw");
  r.params.bs = f.integer("bs");
  r.queuing_delay = f.num("qd");
  r.packet_loss_rate = f.num("plr");
  r.params.cc = static_cast<int>(f.integer("cc"));
  r.params.p = static_cast<int>(f.integer("p"));
  r.params.pp = static_cast<int>(f.integer("pp"));
  r.dataset.total_bytes = f.integer("bytes");
  r.dataset.file_count = f.integer("files");
  r.dataset.mean_file_bytes = f.num("mfb");
  for (const auto& u : kUtilFloats) r.utilization.*(u.ptr) = f.num(u.name);
  r.achieved_throughput = f.num("thr");
  r.measured_power = f.num("pw");
  validate(r, line_no);
  return r;
}

LogBatch ingest_stream(std::istream& is, const std::string& provenance) {
  LogBatch batch;
  batch.provenance = provenance;
  std::string line;
  size_t line_no = 0;
  std::vector<size_t> lines;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    batch.records.push_back(parse_line(line, line_no));
    lines.push_back(line_no);
  }
  if (batch.records.empty()) throw EmptyBatch();

  std::vector<size_t> order(batch.records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& ra = batch.records[a];
    const auto& rb = batch.records[b];
    if (ra.transfer_id != rb.transfer_id) return ra.transfer_id < rb.transfer_id;
    return ra.timestamp < rb.timestamp;
  });
  std::vector<TransferLogRecord> sorted;
  sorted.reserve(order.size());
  for (size_t i : order) sorted.push_back(std::move(batch.records[i]));
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].transfer_id == sorted[i - 1].transfer_id &&
        sorted[i].timestamp <= sorted[i - 1].timestamp)
      throw ParseError(lines[order[i]], "duplicate timestamp within transfer '" +
                                            sorted[i].transfer_id + "'");
  }
  batch.records = std::move(sorted);
  return batch;
}

LogBatch ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open log file '" + path + "'");
  return ingest_stream(in, path);
}

void save_stream(const LogBatch& batch, std::ostream& os) {
  for (const auto& r : batch.records) os << format_line(r) << '\n';
}

void save(const LogBatch& batch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write log file '" + path + "'");
  save_stream(batch, out);
}

namespace {

// Fills NaN entries of values[] by linear interpolation in ts[]; edges take
// the nearest valid value. Returns false when no valid entry exists.
bool interpolate_series(const std::vector<double>& ts, std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> valid;
  for (size_t i = 0; i < n; ++i)
    if (!std::isnan(values[i])) valid.push_back(i);
  if (valid.empty()) return false;
  if (valid.size() == n) return true;

  for (size_t i = 0; i < n; ++i) {
    if (!std::isnan(values[i])) continue;
    auto it = std::lower_bound(valid.begin(), valid.end(), i);
    if (it == valid.begin()) {
      values[i] = values[valid.front()];
    } else if (it == valid.end()) {
      values[i] = values[valid.back()];
    } else {
      const size_t hi = *it;
      const size_t lo = *(it - 1);
      const double w = (ts[i] - ts[lo]) / (ts[hi] - ts[lo]);
      values[i] = values[lo] + w * (values[hi] - values[lo]);
    }
  }
  return true;
}

}  // namespace

LogBatch clean(const LogBatch& batch, double link_bw) {
  if (link_bw <= 0) throw ConfigError("link_bw must be > 0");
  LogBatch out = batch;

  for (auto& r : out.records) {
    if (!std::isnan(r.achieved_throughput) && r.achieved_throughput > link_bw) {
      r.achieved_throughput = link_bw;
      r.capped = true;
    }
  }

  // Per-transfer interpolation of missing fields.
  size_t begin = 0;
  while (begin < out.records.size()) {
    size_t end = begin + 1;
    while (end < out.records.size() &&
           out.records[end].transfer_id == out.records[begin].transfer_id)
      ++end;

    std::vector<double> ts;
    ts.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) ts.push_back(out.records[i].timestamp);

    auto fill = [&](const char* name, auto getter, auto setter) {
      std::vector<double> vals;
      vals.reserve(end - begin);
      for (size_t i = begin; i < end; ++i) vals.push_back(getter(out.records[i]));
      if (!interpolate_series(ts, vals)) throw AllMissing(name);
      for (size_t i = begin; i < end; ++i) setter(out.records[i], vals[i - begin]);
    };

    for (const auto& f : kRecordFloats)
      fill(f.name, [&f](const TransferLogRecord& r) { return r.*(f.ptr); },
           [&f](TransferLogRecord& r, double v) { r.*(f.ptr) = v; });
    for (const auto& u : kUtilFloats)
      fill(u.name, [&u](const TransferLogRecord& r) { return r.utilization.*(u.ptr); },
           [&u](TransferLogRecord& r, double v) { r.utilization.*(u.ptr) = v; });
    fill("mfb", [](const TransferLogRecord& r) { return r.dataset.mean_file_bytes; },
         [](TransferLogRecord& r, double v) { r.dataset.mean_file_bytes = v; });

    begin = end;
  }
  return out;
}

}  // namespace gdf
