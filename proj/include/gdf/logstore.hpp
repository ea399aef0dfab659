#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gdf/domain.hpp"

namespace gdf {

struct DatasetInfo {
  int64_t total_bytes = 0;
  int64_t file_count = 0;
  double mean_file_bytes = 0;
};

/// One periodic sample of a historical transfer. Missing numeric fields are
/// represented as NaN until clean() fills them.
struct TransferLogRecord {
  std::string transfer_id;
  double timestamp = 0;   // seconds since epoch
  double interval = 1;    // seconds
  double rtt = 0;         // seconds
  int64_t bandwidth = 0;  // bits/s
  double queuing_delay = 0;
  double packet_loss_rate = 0;
  ParamSet params;  // params.bs is the record's buffer size
  DatasetInfo dataset;
  Utilization utilization;
  double achieved_throughput = 0;  // bits/s
  double measured_power = 0;       // watts
  bool capped = false;             // set by clean() when throughput was capped
};

struct LogBatch {
  std::vector<TransferLogRecord> records;
  std::string provenance;
};

/// Formats one record in the canonical line format (newline not included).
std::string format_line(const TransferLogRecord& rec);

/// Parses one line; throws ParseError(line_no) on malformed or out-of-range
/// fields.
TransferLogRecord parse_line(const std::string& line, size_t line_no);

LogBatch ingest(const std::string& path);
LogBatch ingest_stream(std::istream& is, const std::string& provenance);

void save(const LogBatch& batch, const std::string& path);
void save_stream(const LogBatch& batch, std::ostream& os);

/// Caps impossible throughput to link_bw (flagging the record) and fills
/// missing numeric fields by per-transfer linear interpolation in time;
/// leading/trailing gaps take the nearest valid value.
LogBatch clean(const LogBatch& batch, double link_bw);

}  // namespace gdf
