#include "armec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "armec/channel.hpp"
#include "armec/passive.hpp"

namespace armec {

namespace {

// Runs task(i) for i in [0, n) on a small pool; results land at their index so
// the output order never depends on completion order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned workers, const std::function<T(std::size_t)>& task) {
  std::vector<T> out(n);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) out[i] = task(i);
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();
  return out;
}

bool active_budget_ok(const ScenarioConfig& cfg) {
  return cfg.amp_budget_override_w.has_value() || active_amp_budget(cfg) > 0.0;
}

bool passive_budget_ok(const ScenarioConfig& cfg) {
  return passive_power_budget(cfg) >= -1e-12 * cfg.total_power_w;
}

std::ostringstream csv_stream(const char* kind) {
  std::ostringstream os;
  os << "# armec-csv v1 " << kind << '\n';
  os << std::setprecision(17);
  return os;
}

void write_user_latencies(std::ostream& os, const BcdResult& r, int num_users) {
  for (int k = 0; k < num_users; ++k) {
    if (k < static_cast<int>(r.final_latency.users.size())) {
      os << ',' << r.final_latency.users[k].total_s;
    } else {
      os << ',';
    }
  }
}

void write_record_tail(std::ostream& os, const RunRecord& r, int num_users) {
  os << ',' << r.seed << ',' << (r.result.converged ? 1 : 0) << ',' << r.result.iterations << ','
     << r.result.final_mcl_s << ',' << r.result.relaxed_mcl_s;
  write_user_latencies(os, r.result, num_users);
  os << '\n';
}

void write_record_header(std::ostream& os, int num_users) {
  os << ",seed,converged,iterations,mcl_s,relaxed_mcl_s";
  for (int k = 1; k <= num_users; ++k) os << ",T_" << k;
  os << '\n';
}

}  // namespace

CVector quantize_phases(const CVector& theta, int levels) {
  if (levels < 2) throw std::invalid_argument("quantize_phases needs at least 2 levels");
  const double two_pi = 2.0 * std::numbers::pi;
  const double step = two_pi / levels;
  CVector out(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    const double amp = std::abs(theta(m));
    double phase = std::arg(theta(m));
    if (phase < 0.0) phase += two_pi;
    const double pos = phase / step;
    double idx = std::floor(pos);
    if (pos - idx > 0.5) idx += 1.0;
    const int level = static_cast<int>(idx) % levels;
    out(m) = std::polar(amp, level * step);
  }
  return out;
}

CVector fit_amplification_budget(const CVector& theta, const RVector& power, const ChannelSet& ch,
                                 double ris_noise_w, double budget_w) {
  const double used = ris_amplification_power(theta, power, ch, ris_noise_w);
  if (!std::isfinite(budget_w) || used <= budget_w) return theta;
  return theta * std::sqrt(std::max(budget_w, 0.0) / used);
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Active: return "active";
    case Variant::Active2Bit: return "active-2bit";
    case Variant::Passive: return "passive";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& name) {
  if (name == "active") return Variant::Active;
  if (name == "active-2bit") return Variant::Active2Bit;
  if (name == "passive") return Variant::Passive;
  throw std::invalid_argument("unknown variant '" + name + "' (active, active-2bit, passive)");
}

BcdResult two_bit_variant(const ScenarioConfig& cfg, const ChannelSet& ch, const SolutionState& continuous) {
  SolutionState start = continuous;
  start.theta = fit_amplification_budget(quantize_phases(continuous.theta, 4), continuous.power, ch,
                                         cfg.ris_noise_w, cfg.amp_budget_w);
  BcdOptions opt;
  opt.optimize_theta = false;
  opt.optimize_power = false;
  opt.warm_start = start;
  return bcd_solve(cfg, ch, opt);
}

std::vector<RunRecord> run_variants(const ScenarioConfig& cfg, std::uint64_t seed,
                                    const std::vector<Variant>& variants, bool fixed_power) {
  auto wants = [&](Variant v) { return std::find(variants.begin(), variants.end(), v) != variants.end(); };
  const Geometry geom = build_geometry(cfg, seed);
  const ChannelSet ch = synthesize_channels(geom, cfg, seed);
  BcdOptions opt;
  opt.seed = seed;
  opt.fixed_power = fixed_power;

  std::vector<RunRecord> out;
  auto record = [&](Variant v, BcdResult r) {
    RunRecord rec;
    rec.variant = v;
    rec.num_elements = cfg.num_elements;
    rec.total_power_w = cfg.total_power_w;
    rec.ris_x_m = cfg.geometry.ris.x;
    rec.seed = seed;
    rec.result = std::move(r);
    out.push_back(std::move(rec));
  };
  if ((wants(Variant::Active) || wants(Variant::Active2Bit)) && active_budget_ok(cfg)) {
    const ScenarioConfig active = validate_config(cfg, SurfaceMode::Active);
    BcdResult cont = bcd_solve(active, ch, opt);
    if (wants(Variant::Active2Bit)) {
      BcdResult q = two_bit_variant(active, ch, cont.state);
      // a quantized design inherits the convergence status of its source
      q.converged = q.converged && cont.converged;
      if (wants(Variant::Active)) record(Variant::Active, cont);
      record(Variant::Active2Bit, std::move(q));
    } else {
      record(Variant::Active, std::move(cont));
    }
  }
  if (wants(Variant::Passive) && passive_budget_ok(cfg)) record(Variant::Passive, passive_baseline(cfg, ch, opt));
  return out;
}

std::vector<ConvergenceRun> run_convergence(const ScenarioConfig& cfg, const std::vector<int>& m_list,
                                            const ExperimentOptions& opt, double amp_budget_w) {
  struct Task {
    int m;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int m : m_list)
    for (auto seed : opt.seeds) tasks.push_back({m, seed});
  return parallel_map<ConvergenceRun>(tasks.size(), opt.workers, [&](std::size_t i) {
    ScenarioConfig c = cfg;
    c.num_elements = tasks[i].m;
    c.amp_budget_override_w = amp_budget_w;
    c = validate_config(c, SurfaceMode::Active);
    const Geometry geom = build_geometry(c, tasks[i].seed);
    const ChannelSet ch = synthesize_channels(geom, c, tasks[i].seed);
    BcdOptions bo;
    bo.seed = tasks[i].seed;
    bo.fixed_power = opt.fixed_power;
    return ConvergenceRun{tasks[i].m, tasks[i].seed, bcd_solve(c, ch, bo)};
  });
}

std::vector<RunRecord> sweep_elements(const ScenarioConfig& cfg, const std::vector<int>& m_list,
                                      const std::vector<double>& total_power_list,
                                      const ExperimentOptions& opt) {
  struct Task {
    double ptot;
    int m;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double p : total_power_list)
    for (int m : m_list)
      for (auto seed : opt.seeds) tasks.push_back({p, m, seed});
  const auto groups = parallel_map<std::vector<RunRecord>>(tasks.size(), opt.workers, [&](std::size_t i) {
    ScenarioConfig c = cfg;
    c.total_power_w = tasks[i].ptot;
    c.num_elements = tasks[i].m;
    return run_variants(c, tasks[i].seed, opt.variants, opt.fixed_power);
  });
  std::vector<RunRecord> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.variant, a.total_power_w, a.num_elements, a.seed) <
           std::tie(b.variant, b.total_power_w, b.num_elements, b.seed);
  });
  return out;
}

std::vector<RunRecord> sweep_location(const ScenarioConfig& cfg, const std::vector<double>& x_list,
                                      const ExperimentOptions& opt) {
  struct Task {
    double x;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double x : x_list)
    for (auto seed : opt.seeds) tasks.push_back({x, seed});
  const auto groups = parallel_map<std::vector<RunRecord>>(tasks.size(), opt.workers, [&](std::size_t i) {
    ScenarioConfig c = cfg;
    c.geometry.ris.x = tasks[i].x;
    return run_variants(c, tasks[i].seed, opt.variants, opt.fixed_power);
  });
  std::vector<RunRecord> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.variant, a.ris_x_m, a.seed) < std::tie(b.variant, b.ris_x_m, b.seed);
  });
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRun>& runs, int num_users) {
  std::ostringstream os = csv_stream("converge");
  os << "M,seed,converged,iter,mcl_s";
  for (int k = 1; k <= num_users; ++k) os << ",T_L_" << k;
  for (int k = 1; k <= num_users; ++k) os << ",T_E_" << k;
  os << ",eps,ris_power_W\n";
  for (const auto& run : runs) {
    for (const auto& t : run.result.trace) {
      os << run.num_elements << ',' << run.seed << ',' << (run.result.converged ? 1 : 0) << ',' << t.iter
         << ',' << t.mcl_s;
      for (int k = 0; k < num_users; ++k) os << ',' << t.local_s(k);
      for (int k = 0; k < num_users; ++k) os << ',' << t.edge_s(k);
      os << ',' << t.eps << ',' << t.ris_power_w << '\n';
    }
  }
  return os.str();
}

std::string sweep_elements_csv(const std::vector<RunRecord>& runs, int num_users) {
  std::ostringstream os = csv_stream("sweep-m");
  os << "variant,P_tot_W,M";
  write_record_header(os, num_users);
  for (const auto& r : runs) {
    os << to_string(r.variant) << ',' << r.total_power_w << ',' << r.num_elements;
    write_record_tail(os, r, num_users);
  }
  return os.str();
}

std::string sweep_location_csv(const std::vector<RunRecord>& runs, int num_users) {
  std::ostringstream os = csv_stream("sweep-loc");
  os << "variant,x_ris_m";
  write_record_header(os, num_users);
  for (const auto& r : runs) {
    os << to_string(r.variant) << ',' << r.ris_x_m;
    write_record_tail(os, r, num_users);
  }
  return os.str();
}

std::string solve_csv(const std::vector<RunRecord>& runs, int num_users) {
  std::ostringstream os = csv_stream("solve");
  os << "variant,M,P_tot_W,x_ris_m";
  write_record_header(os, num_users);
  for (const auto& r : runs) {
    os << to_string(r.variant) << ',' << r.num_elements << ',' << r.total_power_w << ',' << r.ris_x_m;
    write_record_tail(os, r, num_users);
  }
  return os.str();
}

}  // namespace armec
