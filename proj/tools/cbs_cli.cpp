// Command-line front end: parameter sweeps to CSV, the validation battery,
// and raw operator dumps for debugging.
//
// Exit codes: 0 success, 1 failed validation, 2 usage error, 3 numerical
// failure (singular generator or quadrature self-check).

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "cbs/acceptance.hpp"
#include "cbs/average.hpp"
#include "cbs/channels.hpp"
#include "cbs/liouvillian.hpp"
#include "cbs/version.hpp"

namespace {

// Shortest round-trip decimal form; NaN prints as "nan".
std::string num(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> make_grid(double lo, double hi, int n, bool log_spaced) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  if (n == 1) return {lo};
  if (log_spaced && !(lo > 0.0 && hi > 0.0))
    throw std::invalid_argument("log spacing requires positive endpoints");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    g[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  return g;
}

int default_jobs() {
  if (const char* env = std::getenv("CBS_JOBS")) {
    int v = 0;
    const auto res = std::from_chars(env, env + std::string_view(env).size(), v);
    if (res.ec == std::errc{} && v >= 1) return v;
  }
  return 1;
}

struct SweepPlan {
  std::vector<cbs::Channel> channels{cbs::Channel::HelicityPreserving};
  double s_min = 1e-2, s_max = 1e2;
  int s_points = 61;
  bool s_log = false;
  std::vector<double> deltas{0.0};
  double theta_max = 0.0;
  int theta_points = 1;
  // When non-empty the sweep runs over detuning at fixed drive strength
  // omega, with the saturation recomputed per point.
  std::vector<double> omegas;
  double delta_min = 0.0, delta_max = 40.0;
  int delta_points = 81;
};

SweepPlan make_preset(const std::string& name) {
  SweepPlan p;
  if (name == "fig2") {
    p.s_log = true;
  } else if (name == "fig3") {
    p.s_log = true;
    p.s_max = 1e3;
    p.s_points = 41;
    p.deltas = {0.0, 5.0, 10.0, 20.0};
  } else if (name == "fig4") {
    p.omegas = {10.0, 20.0};
  } else if (name == "fig5") {
    p.channels = {cbs::Channel::HelicityFlipped};
    p.s_log = true;
  } else {
    throw CLI::ValidationError("--preset", "unknown preset '" + name + "'");
  }
  return p;
}

int run_sweep(const SweepPlan& plan, const cbs::AverageConfig& cfg, const std::string& out_path,
              int jobs) {
  struct Point {
    cbs::Channel channel;
    double s, delta;
  };
  std::vector<Point> points;
  if (!plan.omegas.empty()) {
    const std::vector<double> dg =
        make_grid(plan.delta_min, plan.delta_max, plan.delta_points, false);
    for (cbs::Channel ch : plan.channels)
      for (double om : plan.omegas)
        for (double d : dg) points.push_back({ch, om * om / (2.0 * (d * d + 1.0)), d});
  } else {
    const std::vector<double> sg = make_grid(plan.s_min, plan.s_max, plan.s_points, plan.s_log);
    for (cbs::Channel ch : plan.channels)
      for (double d : plan.deltas)
        for (double s : sg) points.push_back({ch, s, d});
  }
  std::vector<double> thetas;
  if (plan.theta_points == 1)
    thetas = {plan.theta_max};
  else {
    thetas = make_grid(0.0, plan.theta_max, plan.theta_points, false);
  }

  const auto evaluate = [&](const Point& p) {
    const cbs::ChannelObservables obs =
        cbs::averaged_channel(p.channel, p.s, p.delta, thetas, cfg);
    std::string rows;
    for (size_t i = 0; i < thetas.size(); ++i) {
      rows += cbs::channel_name(p.channel);
      rows += ',';
      rows += num(p.s) + ',' + num(p.delta) + ',' + num(thetas[i]) + ',';
      rows += num(obs.L1) + ',' + num(obs.L2_tot) + ',' + num(obs.C2_tot[i]) + ',';
      rows += num(obs.L2_tot + obs.C2_tot[i]) + ',';
      rows += num(obs.L2_el) + ',' + num(obs.C2_el[i]) + ',';
      rows += num(obs.alpha_tot) + ',' + num(obs.alpha_el) + ',';
      rows += cbs::average_mode_name(cfg.mode);
      rows += ',';
      rows += num(cfg.kl);
      rows += '\n';
    }
    return rows;
  };

  std::vector<std::string> chunks(points.size());
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  if (nthreads == 1) {
    for (size_t i = 0; i < points.size(); ++i) chunks[i] = evaluate(points[i]);
  } else {
    std::atomic<size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
      while (!stop.load(std::memory_order_relaxed)) {
        const size_t i = next.fetch_add(1);
        if (i >= points.size()) return;
        try {
          chunks[i] = evaluate(points[i]);
        } catch (...) {
          {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
          stop.store(true);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::ofstream file;
  const bool to_stdout = out_path.empty() || out_path == "-";
  if (!to_stdout) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open '" << out_path << "' for writing\n";
      return 2;
    }
  }
  std::ostream& os = to_stdout ? std::cout : file;
  os << "# cbs " << cbs::kVersion << " sweep\n";
  os << "# mode=" << cbs::average_mode_name(cfg.mode) << " kl=" << num(cfg.kl)
     << " nodes-cos=" << cfg.nodes_cos << " nodes-phi=" << cfg.nodes_phi
     << " nodes-radial=" << cfg.nodes_radial << "\n";
  os << "channel,s,delta,theta,L1,L2_tot,C2_tot,I2_tot,L2_el,C2_el,alpha_tot,alpha_el,mode,kl\n";
  for (const std::string& c : chunks) os << c;
  os.flush();
  return os ? 0 : 2;
}

int run_verify(const std::string& only) {
  const std::vector<cbs::CheckResult> results = cbs::run_acceptance(only, &std::cout);
  if (results.empty()) {
    std::cerr << "error: no checks match '" << only << "'\n";
    return 2;
  }
  int failed = 0;
  for (const cbs::CheckResult& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

int run_dump(cbs::Channel channel, double s, double delta, double costheta, double phi, double r12,
             const std::string& frame_name, const std::string& out_path) {
  const cbs::ChannelTraits& traits = cbs::channel_traits(channel);
  const cbs::DriveParams drive = cbs::DriveParams::from_saturation(s, delta, traits.eps_laser);
  cbs::PairGeometry geom(std::acos(costheta), phi, r12);
  geom.projector = cbs::channel_projector(traits, geom.projector);
  const cbs::InteractionFrame frame = frame_name == "rotated"
                                          ? cbs::InteractionFrame::PhaseRotated
                                          : cbs::InteractionFrame::LaserPhases;
  const cbs::LiouvilleSystem sys = cbs::build_pair_system(drive, geom, traits.k_laser, frame);
  std::ofstream file;
  const bool to_stdout = out_path.empty() || out_path == "-";
  if (!to_stdout) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open '" << out_path << "' for writing\n";
      return 2;
    }
  }
  cbs::dump_system(to_stdout ? std::cout : file, sys);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state backscattering interference of a driven atom pair"};
  app.set_version_flag("--version", std::string("cbs ") + cbs::kVersion);
  app.require_subcommand(1);

  // ---- sweep ----
  CLI::App* sweep = app.add_subcommand("sweep", "write averaged observables over a grid as CSV");
  std::string channel_name = "hparh", preset, mode_name = "phase", out_path = "-";
  double s_min = 1e-2, s_max = 1e2, delta = 0.0, theta_max = 0.0, kl = 1e3;
  int s_points = 61, theta_points = 1, nodes_angular = 64, nodes_radial = 32;
  int jobs = default_jobs();
  bool s_log = false;
  sweep->add_option("--channel", channel_name, "polarization channel")
      ->check(CLI::IsMember({"hparh", "hperph", "linparlin", "linperplin", "scalar"}));
  sweep->add_option("--preset", preset, "named sweep (fig2..fig5); explicit flags override")
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5"}));
  sweep->add_option("--s-min", s_min, "lowest saturation");
  sweep->add_option("--s-max", s_max, "highest saturation");
  sweep->add_option("--s-points", s_points, "saturation grid size")->check(CLI::PositiveNumber);
  sweep->add_flag("--s-log", s_log, "logarithmic saturation grid");
  sweep->add_option("--delta", delta, "detuning in linewidths");
  sweep->add_option("--theta-max", theta_max, "largest deviation angle from exact backscattering");
  sweep->add_option("--theta-points", theta_points, "deviation grid size (1 = only theta-max)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--kl", kl, "mean separation in reduced units")->check(CLI::PositiveNumber);
  sweep->add_option("--mode", mode_name, "averaging mode")
      ->check(CLI::IsMember({"phase", "radial"}));
  sweep->add_option("--nodes-angular", nodes_angular, "orientation nodes per dimension")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--nodes-radial", nodes_radial, "radial window nodes (radial mode)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "output file ('-' = stdout)");
  sweep->add_option("--jobs", jobs, "worker threads (default $CBS_JOBS or 1)")
      ->check(CLI::PositiveNumber);

  // ---- verify ----
  CLI::App* verify = app.add_subcommand("verify", "run the validation battery");
  std::string only;
  verify->add_option("--only", only, "run only checks whose name contains this substring");

  // ---- dump ----
  CLI::App* dump = app.add_subcommand("dump", "print generator, coupling and source entries");
  std::string dump_channel = "hparh", frame_name = "laser", dump_out = "-";
  double d_s = 1.0, d_delta = 0.0, d_costheta = 0.5, d_phi = 0.3, d_r12 = 20.0;
  dump->add_option("--channel", dump_channel, "polarization channel")
      ->check(CLI::IsMember({"hparh", "hperph", "linparlin", "linperplin", "scalar"}));
  dump->add_option("--s", d_s, "saturation");
  dump->add_option("--delta", d_delta, "detuning in linewidths");
  dump->add_option("--costheta", d_costheta, "axis polar cosine")->check(CLI::Range(-1.0, 1.0));
  dump->add_option("--phi", d_phi, "axis azimuth");
  dump->add_option("--r12", d_r12, "separation in reduced units")->check(CLI::PositiveNumber);
  dump->add_option("--frame", frame_name, "interaction frame")
      ->check(CLI::IsMember({"laser", "rotated"}));
  dump->add_option("--out", dump_out, "output file ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) {
      SweepPlan plan = preset.empty() ? SweepPlan{} : make_preset(preset);
      if (sweep->count("--channel")) plan.channels = {cbs::parse_channel(channel_name)};
      if (sweep->count("--s-min")) plan.s_min = s_min;
      if (sweep->count("--s-max")) plan.s_max = s_max;
      if (sweep->count("--s-points")) plan.s_points = s_points;
      if (sweep->count("--s-log")) plan.s_log = s_log;
      if (sweep->count("--delta")) {
        plan.deltas = {delta};
        plan.omegas.clear();
      }
      if (sweep->count("--theta-max")) plan.theta_max = theta_max;
      if (sweep->count("--theta-points")) plan.theta_points = theta_points;
      cbs::AverageConfig cfg;
      cfg.kl = kl;
      cfg.mode = cbs::parse_average_mode(mode_name);
      cfg.nodes_cos = nodes_angular;
      cfg.nodes_phi = nodes_angular;
      cfg.nodes_radial = nodes_radial;
      return run_sweep(plan, cfg, out_path, jobs);
    }
    if (verify->parsed()) return run_verify(only);
    if (dump->parsed())
      return run_dump(cbs::parse_channel(dump_channel), d_s, d_delta, d_costheta, d_phi, d_r12,
                      frame_name, dump_out);
  } catch (const cbs::SingularGeneratorError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const cbs::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
