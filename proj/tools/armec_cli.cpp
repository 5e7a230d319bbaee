// armec: latency-minimization runs and sweeps for active-RIS edge computing.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "armec/bcd.hpp"
#include "armec/channel.hpp"
#include "armec/experiments.hpp"
#include "armec/passive.hpp"

namespace {

using namespace armec;

// "20" -> 1..20, "3-7" -> 3..7, "1,4,9" -> that list
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  } else if (auto dash = text.find('-'); dash != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dash));
    const auto hi = std::stoull(text.substr(dash + 1));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    const auto n = std::stoull(text);
    for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<Variant> out;
  for (const auto& joined : names) {
    std::stringstream ss(joined);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(variant_from_string(item));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

ScenarioConfig base_config(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

bool all_converged(const std::vector<RunRecord>& runs) {
  return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.result.converged; });
}

void report_failures(const std::vector<RunRecord>& runs) {
  for (const auto& r : runs) {
    if (r.result.converged) continue;
    std::cerr << "not converged: " << to_string(r.variant) << " M=" << r.num_elements << " seed=" << r.seed;
    if (!r.result.failure.empty()) std::cerr << " (" << r.result.failure << ")";
    std::cerr << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-latency minimization for active-RIS aided edge computing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seeds_spec;
  std::string out_path;
  std::vector<std::string> variant_names{"active,active-2bit,passive"};
  bool fixed_power = false;
  unsigned workers = 0;

  auto common = [&](CLI::App* sub, const std::string& default_seeds) {
    sub->add_option("--config", config_path, "scenario JSON (armec.scenario/1)")->check(CLI::ExistingFile);
    sub->add_option("--seeds", seeds_spec, "count N (1..N), range a-b or list a,b,c")->default_str(default_seeds);
    sub->add_option("--out", out_path, "output CSV (default stdout)");
    sub->add_flag("--fixed-power", fixed_power, "pin every p_k to p_max");
    sub->add_option("--workers", workers, "concurrent runs (0: all cores)");
  };

  auto* converge = app.add_subcommand("converge", "BCD traces for several element counts");
  std::vector<int> conv_m{8, 16, 32};
  double conv_budget_mw = 10.0;
  common(converge, "20");
  converge->add_option("--elements", conv_m, "element counts M")->delimiter(',')->capture_default_str();
  converge->add_option("--amp-budget-mw", conv_budget_mw, "pinned amplification budget")->capture_default_str();

  auto* sweep_m = app.add_subcommand("sweep-m", "final latency versus element count");
  std::vector<int> sweep_m_list{4, 8, 12, 16, 20, 28, 36, 44};
  std::vector<double> ptot_mw{10.0, 20.0};
  sweep_m->add_option("--elements", sweep_m_list, "element counts M")->delimiter(',')->capture_default_str();
  sweep_m->add_option("--ptot-mw", ptot_mw, "total RIS power budgets")->delimiter(',')->capture_default_str();
  sweep_m->add_option("--variant", variant_names, "active, active-2bit, passive (comma separated)");
  common(sweep_m, "20");

  auto* sweep_loc = app.add_subcommand("sweep-loc", "final latency versus RIS x-coordinate");
  std::vector<double> x_list{200.0, 220.0, 240.0, 260.0, 280.0};
  sweep_loc->add_option("--x", x_list, "RIS x positions (m)")->delimiter(',')->capture_default_str();
  sweep_loc->add_option("--variant", variant_names, "active, active-2bit, passive (comma separated)");
  common(sweep_loc, "20");

  auto* solve = app.add_subcommand("solve", "one scenario, one or more seeds");
  std::string trace_path, channels_path, programs_dir;
  solve->add_option("--variant", variant_names, "active, active-2bit, passive (comma separated)");
  solve->add_option("--trace", trace_path, "iteration trace CSV of the first seed's first variant");
  solve->add_option("--dump-channels", channels_path, "channel realization JSON of the first seed");
  solve->add_option("--dump-programs", programs_dir,
                    "directory for the theta and power conic programs at the final active state");
  common(solve, "1");

  CLI11_PARSE(app, argc, argv);

  try {
    const ScenarioConfig cfg = base_config(config_path);
    ExperimentOptions opt;
    opt.seeds = parse_seeds(seeds_spec.empty() ? (app.got_subcommand(solve) ? "1" : "20") : seeds_spec);
    opt.variants = parse_variants(variant_names);
    opt.fixed_power = fixed_power;
    opt.workers = workers;
    const int K = cfg.num_users();

    if (converge->parsed()) {
      const auto runs = run_convergence(cfg, conv_m, opt, conv_budget_mw * 1e-3);
      emit(out_path, convergence_csv(runs, K));
      bool ok = true;
      for (const auto& r : runs) {
        if (!r.result.converged) {
          ok = false;
          std::cerr << "not converged: M=" << r.num_elements << " seed=" << r.seed << '\n';
        }
      }
      return ok ? 0 : 1;
    }
    if (sweep_m->parsed()) {
      std::vector<double> ptot_w;
      for (double p : ptot_mw) ptot_w.push_back(p * 1e-3);
      const auto runs = sweep_elements(cfg, sweep_m_list, ptot_w, opt);
      emit(out_path, sweep_elements_csv(runs, K));
      report_failures(runs);
      return all_converged(runs) ? 0 : 1;
    }
    if (sweep_loc->parsed()) {
      const auto runs = sweep_location(cfg, x_list, opt);
      emit(out_path, sweep_location_csv(runs, K));
      report_failures(runs);
      return all_converged(runs) ? 0 : 1;
    }
    if (solve->parsed()) {
      std::vector<RunRecord> runs;
      for (auto seed : opt.seeds) {
        auto recs = run_variants(cfg, seed, opt.variants, opt.fixed_power);
        runs.insert(runs.end(), recs.begin(), recs.end());
      }
      if (runs.empty()) throw ConfigError(ConfigErrorCode::NonPositiveBudget, "no variant is feasible for this scenario");
      emit(out_path, solve_csv(runs, K));
      if (!trace_path.empty()) emit(trace_path, trace_to_csv(runs.front().result.trace));
      const std::uint64_t seed = opt.seeds.front();
      const ChannelSet ch = synthesize_channels(build_geometry(cfg, seed), cfg, seed);
      if (!channels_path.empty()) emit(channels_path, channels_to_json(ch));
      if (!programs_dir.empty()) {
        const auto it = std::find_if(runs.begin(), runs.end(), [&](const RunRecord& r) {
          return r.variant == Variant::Active && r.seed == seed;
        });
        if (it == runs.end()) throw std::runtime_error("--dump-programs needs the active variant");
        const ScenarioConfig active = validate_config(cfg);
        const NoisePowers noise = noise_for(active, SurfaceMode::Active);
        SolutionState s = it->result.state;
        s.aux_v = optimal_aux_weights(s, ch, noise);
        std::filesystem::create_directories(programs_dir);
        emit(programs_dir + "/theta_program.json",
             conic::program_to_json(build_theta_program(s, ch, noise, active, active.amp_budget_w)));
        emit(programs_dir + "/power_program.json",
             conic::program_to_json(build_power_program(s, ch, noise, active, active.amp_budget_w)));
      }
      report_failures(runs);
      return all_converged(runs) ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
