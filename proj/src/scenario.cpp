#include "gdf/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>

#include "gdf/errors.hpp"
#include "text_util.hpp"

namespace gdf {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  std::string key;
  std::string value;
  size_t line_no;

  double num() const { return text::parse_double(value, line_no); }
  int64_t integer() const { return text::parse_int(value, line_no); }
};

[[noreturn]] void unknown(const KeyValue& kv, const std::string& section) {
  throw ConfigError("line " + std::to_string(kv.line_no) + ": unknown key '" + kv.key +
                    "' in [" + section + "]");
}

}  // namespace

Scenario parse_scenario(std::istream& is) {
  Scenario sc;
  std::string section;
  std::string line;
  size_t line_no = 0;
  PowerModel power;
  bool has_power = false;

  auto handle = [&](const KeyValue& kv) {
    if (section == "link") {
      if (kv.key == "bandwidth") sc.link.bandwidth = kv.num();
      else if (kv.key == "rtt") sc.link.rtt = kv.num();
      else if (kv.key == "buffer") sc.link.buffer = kv.integer();
      else if (kv.key == "v_read") sc.link.v_read = kv.num();
      else if (kv.key == "v_write") sc.link.v_write = kv.num();
      else unknown(kv, section);
    } else if (section == "sim") {
      if (kv.key == "seed") sc.seed = static_cast<uint64_t>(kv.integer());
      else if (kv.key == "tick") sc.tick = kv.num();
      else if (kv.key == "duration") sc.duration = kv.num();
      else if (kv.key == "loss_factor") sc.loss_factor = kv.num();
      else unknown(kv, section);
    } else if (section == "power") {
      has_power = true;
      static const char* names[] = {"cpu", "mem", "dr",  "dw", "dbr",
                                    "dbw", "nbs", "nbr", "ps", "pr"};
      if (kv.key == "intercept") {
        power.intercept = kv.num();
        return;
      }
      for (int i = 0; i < Utilization::kFeatures; ++i)
        if (kv.key == names[i]) {
          power.coefficients[static_cast<size_t>(i)] = kv.num();
          return;
        }
      unknown(kv, section);
    } else if (section == "util") {
      if (kv.key == "c0") sc.util.c0 = kv.num();
      else if (kv.key == "c1") sc.util.c1 = kv.num();
      else if (kv.key == "c2") sc.util.c2 = kv.num();
      else unknown(kv, section);
    } else if (section == "transfer") {
      TransferSpec& t = sc.transfers.back();
      if (kv.key == "id") t.id = kv.value;
      else if (kv.key == "src") t.src = kv.value;
      else if (kv.key == "dst") t.dst = kv.value;
      else if (kv.key == "files") t.workload.file_count = kv.integer();
      else if (kv.key == "file_lo") t.workload.file_lo = kv.num();
      else if (kv.key == "file_hi") t.workload.file_hi = kv.num();
      else if (kv.key == "cc") t.params.cc = static_cast<int>(kv.integer());
      else if (kv.key == "p") t.params.p = static_cast<int>(kv.integer());
      else if (kv.key == "pp") t.params.pp = static_cast<int>(kv.integer());
      else if (kv.key == "bs") t.params.bs = kv.integer();
      else if (kv.key == "start") t.start = kv.num();
      else if (kv.key == "cluster") t.cluster = static_cast<int>(kv.integer());
      else if (kv.key == "opportunistic") t.opportunistic = kv.integer() != 0;
      else if (kv.key == "sla_kind") {
        if (kv.value.size() != 1)
          throw ConfigError("line " + std::to_string(kv.line_no) + ": sla_kind must be T, E or P");
        if (!t.sla) t.sla = SlaSpec{};
        t.sla->kind = sla_kind_from_char(kv.value[0]);
      } else if (kv.key == "sla_value") {
        if (!t.sla) t.sla = SlaSpec{};
        t.sla->value = kv.num();
      } else if (kv.key == "epsilon") {
        if (!t.sla) t.sla = SlaSpec{};
        t.sla->epsilon = kv.num();
      } else {
        unknown(kv, section);
      }
    } else if (section == "flow") {
      ExternalFlow& f = sc.flows.back();
      if (kv.key == "start") f.start = kv.num();
      else if (kv.key == "end") f.end = kv.num();
      else if (kv.key == "rate") f.rate = kv.num();
      else unknown(kv, section);
    } else {
      throw ConfigError("line " + std::to_string(kv.line_no) + ": key '" + kv.key +
                        "' outside any section");
    }
  };

  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "transfer") sc.transfers.emplace_back();
      else if (section == "flow") sc.flows.emplace_back();
      else if (section != "link" && section != "sim" && section != "power" &&
               section != "util")
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    handle(KeyValue{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }

  if (has_power) sc.power = power;
  for (size_t i = 0; i < sc.transfers.size(); ++i) {
    TransferSpec& t = sc.transfers[i];
    if (t.id.empty()) t.id = "tr" + std::to_string(i);
    if (!t.params.valid())
      throw ConfigError("transfer '" + t.id + "': invalid parameters");
    if (t.sla && !t.sla->valid())
      throw ConfigError("transfer '" + t.id + "': invalid sla");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path + "'");
  return parse_scenario(in);
}

SimWorld make_world(const Scenario& sc, uint64_t seed_override) {
  double tick = sc.tick;
  if (const char* env = std::getenv("GDF_TICK")) {
    const double t = text::parse_double(env);
    if (t <= 0) throw ConfigError("GDF_TICK must be positive");
    tick = t;
  }
  SimWorld world(sc.link, seed_override ? seed_override : sc.seed, tick);
  world.set_loss_factor(sc.loss_factor);
  if (sc.power) world.set_power_model(*sc.power);
  world.set_util_synthesis(sc.util);
  for (const auto& t : sc.transfers)
    world.add_transfer(t.id, t.workload, t.params, ResourceGroup{}, t.start);
  for (const auto& f : sc.flows) world.add_external_flow(f);
  return world;
}

}  // namespace gdf
