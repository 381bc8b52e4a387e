#include "relaydual/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relaydual/errors.hpp"

namespace relaydual {

namespace {

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void SweepConfig::check() const {
  if (rate_grid.empty()) throw ParseError("sweep needs a nonempty rate grid");
  for (size_t i = 1; i < rate_grid.size(); ++i) {
    if (!(rate_grid[i] > rate_grid[i - 1])) {
      throw ParseError("rate grid must be strictly increasing");
    }
  }
  if (cases.empty()) throw ParseError("sweep needs at least one strategy case");
  if (!instance_path && (num_relays < 1 || num_users < 1)) {
    throw ParseError("sweep dimensions must be positive");
  }
}

NetworkInstance SweepConfig::make_instance() const {
  NetworkInstance inst = instance_path ? load_instance(*instance_path)
                                       : generate_rayleigh(num_relays, num_users, seed);
  if (sigma2) inst.noise_power = *sigma2;
  if (caps) {
    inst.fronthaul_caps = *caps;
    if (static_cast<int>(caps->size()) == 1) {
      inst.fronthaul_caps.assign(inst.num_relays, caps->front());
    }
  }
  inst.check_invariants();
  return inst;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sweep config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("sweep config " + path + ": " + e.what());
  }

  SweepConfig cfg;
  try {
    if (j.contains("instance")) cfg.instance_path = j["instance"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("M")) cfg.num_relays = j["M"].get<int>();
    if (j.contains("K")) cfg.num_users = j["K"].get<int>();
    if (j.contains("sigma2")) cfg.sigma2 = j["sigma2"].get<double>();
    if (j.contains("caps")) {
      if (j["caps"].is_number()) {
        cfg.caps = std::vector<double>{j["caps"].get<double>()};
      } else {
        cfg.caps = j["caps"].get<std::vector<double>>();
      }
    }
    if (j.contains("rate_grid")) cfg.rate_grid = j["rate_grid"].get<std::vector<double>>();
    if (j.contains("cases")) {
      cfg.cases.clear();
      for (const auto& c : j["cases"]) {
        cfg.cases.push_back(strategy_case_from_string(c.get<std::string>()));
      }
    }
    if (j.contains("decode_order")) {
      cfg.decode_order = j["decode_order"].get<std::vector<int>>();
    }
    if (j.contains("decompress_order")) {
      cfg.decompress_order = j["decompress_order"].get<std::vector<int>>();
    }
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      if (t.contains("gap_lp")) cfg.tolerances.gap_lp = t["gap_lp"].get<double>();
      if (t.contains("gap_sdp")) cfg.tolerances.gap_sdp = t["gap_sdp"].get<double>();
      if (t.contains("dual_match")) cfg.tolerances.dual_match = t["dual_match"].get<double>();
      if (t.contains("tightness")) cfg.tolerances.tightness = t["tightness"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("sweep config " + path + ": " + e.what());
  }
  cfg.check();
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.check();
  const NetworkInstance instance = config.make_instance();

  std::vector<StrategyCase> cases = config.cases;
  std::sort(cases.begin(), cases.end());
  cases.erase(std::unique(cases.begin(), cases.end()), cases.end());

  std::vector<SweepRow> rows;
  for (StrategyCase c : cases) {
    StrategyConfig strategy = StrategyConfig::natural(c, instance.num_users, instance.num_relays);
    if (config.decode_order) strategy.decode_order = *config.decode_order;
    if (config.decompress_order) strategy.decompress_order = *config.decompress_order;
    strategy.check_invariants(instance.num_users, instance.num_relays);
    for (double target : config.rate_grid) {
      const auto t0 = std::chrono::steady_clock::now();
      const DualityReport report =
          verify_duality(instance, RateTargets::symmetric(instance.num_users, target), strategy,
                         config.tolerances, config.solver, config.barrier);
      const auto t1 = std::chrono::steady_clock::now();

      SweepRow row;
      row.case_id = c;
      row.rate_target = target;
      row.feasible = report.uplink_feasible && report.downlink_feasible;
      row.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
      if (row.feasible) {
        row.ul_power = report.uplink_sum_power;
        row.dl_power = report.downlink_sum_power;
        row.rel_gap = report.relative_gap;
        row.beta_resid = report.beta_residual;
        row.q_resid = report.q_residual;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string csv_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "case,rate_target,ul_power,dl_power,rel_gap,beta_resid,q_resid,status\n";
  for (const SweepRow& r : rows) {
    out << to_string(r.case_id) << ',' << fmt12(r.rate_target) << ',';
    if (r.feasible) {
      out << fmt12(r.ul_power) << ',' << fmt12(r.dl_power) << ',' << fmt12(r.rel_gap) << ','
          << fmt12(r.beta_resid) << ',' << fmt12(r.q_resid) << ",ok\n";
    } else {
      out << ",,,,,infeasible\n";
    }
  }
  return out.str();
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw ParseError("refusing to emit an empty sweep table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write CSV: " + path);
  out << csv_text(rows);
  if (!out) throw ParseError("write failed: " + path);
}

std::vector<SweepRow> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV is empty: " + path);
  if (line != "case,rate_target,ul_power,dl_power,rel_gap,beta_resid,q_resid,status") {
    throw ParseError("unexpected CSV header in " + path);
  }

  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 8) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 8 fields");
    }
    SweepRow row;
    row.case_id = strategy_case_from_string(fields[0]);
    row.rate_target = std::stod(fields[1]);
    row.feasible = fields[7] == "ok";
    if (row.feasible) {
      row.ul_power = std::stod(fields[2]);
      row.dl_power = std::stod(fields[3]);
      row.rel_gap = std::stod(fields[4]);
      row.beta_resid = std::stod(fields[5]);
      row.q_resid = std::stod(fields[6]);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace relaydual
