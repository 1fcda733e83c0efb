#pragma once

// End-to-end validation battery.  Each check exercises the full pipeline
// against an independent reference: closed-form curves, structural
// identities, known limits, or scaling laws.  The checks are deliberately
// self-contained so a failure pinpoints the broken layer.
//
// Quadrature notes: in PhaseAverage mode the orientation integrands at
// exact backscattering are trigonometric polynomials of low degree, so
// small node counts (12 x 12) integrate them exactly; checks probing the
// angular profile use 16 x 16 to cover the detector-offset phase, whose
// azimuthal harmonics decay like Bessel coefficients.

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbs/analytic.hpp"
#include "cbs/average.hpp"
#include "cbs/channels.hpp"
#include "cbs/liouvillian.hpp"
#include "cbs/spherical.hpp"
#include "cbs/steady_state.hpp"

namespace cbs {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream o;
  o << std::setprecision(3) << std::scientific << x;
  return o.str();
}

inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

inline AverageConfig coarse_config(int nodes) {
  AverageConfig cfg;
  cfg.nodes_cos = nodes;
  cfg.nodes_phi = nodes;
  cfg.mode = AverageMode::PhaseAverage;
  return cfg;
}

template <typename F>
double golden_max(F&& f, double a, double b, double tol) {
  const double gr = 0.61803398874989485;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Weighted least-squares fit y ~ sum_k c_k s^{k+1} with weights 1/s;
/// returns the quadratic-to-linear coefficient ratio -c2/c1.
inline double quadratic_ratio(const std::vector<double>& s, const std::vector<double>& y) {
  const int n = static_cast<int>(s.size());
  Eigen::MatrixXd m(n, 4);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / s[i];
    double p = s[i];
    for (int k = 0; k < 4; ++k) {
      m(i, k) = w * p;
      p *= s[i];
    }
    b(i) = w * y[i];
  }
  const Eigen::VectorXd c = m.colPivHouseholderQr().solve(b);
  return -c(1) / c(0);
}

/// Least-squares slope of log|y| against log s.
inline double loglog_slope(const std::vector<double>& s, const std::vector<double>& y) {
  const int n = static_cast<int>(s.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double xi = std::log(s[i]), yi = std::log(std::abs(y[i]));
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- check 1

inline CheckResult check_fixed_geometry(double tol = 1e-10) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uct(-0.9, 0.9), uphi(0.0, 6.283185307179586),
      ur(8.0, 40.0), ukt(-1.0, 1.0);
  const SphericalVec eps = spherical_unit(+1);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double ct = uct(rng), phi = uphi(rng), r12 = ur(rng);
    const double kct = ukt(rng), kphi = uphi(rng);
    const PairGeometry geom(std::acos(ct), phi, r12);
    const CartesianVec khat = cartesian_unit_vector(std::acos(kct), kphi);
    const double chi = r12 * khat.dot(geom.nhat_cartesian);
    const double v = r12 * geom.nhat_cartesian.z();
    const Complex dpp = geom.projector(sph_index(+1), sph_index(+1));
    const double pref = std::norm(geom.g) * std::norm(dpp);
    for (double s : {0.1, 1.0, 10.0}) {
      const DriveParams drive = DriveParams::from_saturation(s, 0.0, eps);
      const OrderResolved ord =
          order_resolved_intensity(Channel::HelicityPreserving, drive, geom, 2);
      const double pop_ref = pref * analytic::R2(s) / analytic::P(s);
      worst = std::max(worst, rel_err(std::real(ord.population[2]), pop_ref));
      const double coh_env = pref * analytic::R1(s) / ((4.0 + s) * analytic::P(s));
      const double coh =
          2.0 * std::real(ord.pair_coherence[2] * std::polar(1.0, chi));
      worst = std::max(worst, std::abs(coh - coh_env * std::cos(chi + v)) / coh_env);
    }
  }
  return {"fixed_geometry_order2_identity", worst <= tol,
          "60 geometry/saturation points, max rel err " + fmt(worst) + " (tol " + fmt(tol) + ")"};
}

// ---------------------------------------------------------------- check 2

inline CheckResult check_averaged_closed_form(double tol = 1e-6) {
  const AverageConfig cfg = coarse_config(12);
  const double gt2 = (1.5 / cfg.kl) * (1.5 / cfg.kl);
  double worst = 0.0;
  for (double s : {0.01, 0.1, 0.7, 1.0, 10.0, 100.0}) {
    const ChannelObservables obs = averaged_channel(Channel::HelicityPreserving, s, 0.0, {}, cfg);
    const analytic::SecondOrderCurves ref =
        analytic::channel_curves(Channel::HelicityPreserving, s, gt2);
    worst = std::max(worst, rel_err(obs.L2_tot, ref.L2_tot));
    worst = std::max(worst, rel_err(obs.C2_tot0, ref.C2_tot0));
  }
  return {"hparh_averaged_closed_form", worst <= tol,
          "ladder and interference vs reference curves, max rel err " + fmt(worst)};
}

// ---------------------------------------------------------------- check 3

inline CheckResult check_enhancement(double tol_limits = 1e-3, double tol_curve = 1e-6) {
  const AverageConfig cfg = coarse_config(12);
  bool ok = true;
  std::ostringstream det;
  const double a_lo = enhancement(Channel::HelicityPreserving, 1e-4, 0.0, cfg);
  const double a_hi = enhancement(Channel::HelicityPreserving, 1e3, 0.0, cfg);
  ok = ok && std::abs(a_lo - 2.0) <= tol_limits;
  ok = ok && std::abs(a_hi - 23.0 / 21.0) <= tol_limits;
  det << "alpha(1e-4)=" << std::setprecision(8) << a_lo << ", alpha(1e3)=" << a_hi;
  double worst = 0.0;
  for (double s : {0.1, 1.0, 10.0})
    worst = std::max(worst, rel_err(enhancement(Channel::HelicityPreserving, s, 0.0, cfg),
                                    analytic::alpha_closed(s)));
  ok = ok && worst <= tol_curve;
  det << ", curve max rel err " << fmt(worst);
  return {"enhancement_factor_values", ok, det.str()};
}

// ---------------------------------------------------------------- check 4

inline CheckResult check_small_saturation(double tol = 0.01) {
  const AverageConfig cfg = coarse_config(12);
  std::vector<double> ss(8);
  for (int i = 0; i < 8; ++i) ss[i] = 1e-3 * std::pow(100.0, i / 7.0);
  std::vector<double> hc, hl, sc, sl, sec, sel;
  for (double s : ss) {
    const auto obs = averaged_channels({Channel::HelicityPreserving, Channel::ScalarTwoLevel}, s,
                                       0.0, {}, cfg);
    hc.push_back(obs[0].C2_tot0);
    hl.push_back(obs[0].L2_tot);
    sc.push_back(obs[1].C2_tot0);
    sl.push_back(obs[1].L2_tot);
    sec.push_back(obs[1].C2_el0);
    sel.push_back(obs[1].L2_el);
  }
  struct Case {
    const char* label;
    const std::vector<double>* y;
    double target;
  };
  const Case cases[] = {
      {"hparh C", &hc, analytic::small_s_quadratic_ratio(Channel::HelicityPreserving, false, true)},
      {"hparh L", &hl, analytic::small_s_quadratic_ratio(Channel::HelicityPreserving, false, false)},
      {"scalar C", &sc, analytic::small_s_quadratic_ratio(Channel::ScalarTwoLevel, false, true)},
      {"scalar L", &sl, analytic::small_s_quadratic_ratio(Channel::ScalarTwoLevel, false, false)},
      {"scalar elC", &sec, analytic::small_s_quadratic_ratio(Channel::ScalarTwoLevel, true, true)},
      {"scalar elL", &sel, analytic::small_s_quadratic_ratio(Channel::ScalarTwoLevel, true, false)},
  };
  bool ok = true;
  std::ostringstream det;
  for (const Case& c : cases) {
    const double r = quadratic_ratio(ss, *c.y);
    const double err = std::abs(r / c.target - 1.0);
    ok = ok && err <= tol;
    det << c.label << "=" << std::setprecision(4) << r << " ";
  }
  return {"small_saturation_quadratic_laws", ok, det.str() + "(targets within 1%)"};
}

// ---------------------------------------------------------------- check 5

inline CheckResult check_elastic_reciprocity(double tol_pair = 1e-12, double tol_curve = 1e-6) {
  AverageConfig cfg = coarse_config(12);
  const double gt2 = (1.5 / cfg.kl) * (1.5 / cfg.kl);
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> us(std::log(0.05), std::log(5.0)), ud(0.25, 3.0),
      usign(0.0, 1.0);
  double worst_pair = 0.0, worst_curve = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double s = std::exp(us(rng));
    const double delta = i == 0 ? 0.0 : (usign(rng) < 0.5 ? -1.0 : 1.0) * ud(rng);
    const ChannelObservables obs =
        averaged_channel(Channel::HelicityPreserving, s, delta, {}, cfg);
    worst_pair = std::max(worst_pair, rel_err(obs.L2_el, obs.C2_el0));
    const double ref = analytic::hparh_elastic(s, delta, gt2);
    worst_curve = std::max(worst_curve, rel_err(obs.L2_el, ref));
    worst_curve = std::max(worst_curve, rel_err(obs.C2_el0, ref));
  }
  // negative control: skewing one exchange part must break the equality
  cfg.exchange_asymmetry_hook = 1e-3;
  const ChannelObservables skew = averaged_channel(Channel::HelicityPreserving, 1.0, 0.7, {}, cfg);
  const double broken = rel_err(skew.L2_el, skew.C2_el0);
  const bool ok = worst_pair <= tol_pair && worst_curve <= tol_curve && broken > 1e-7;
  return {"elastic_reciprocity", ok,
          "ladder vs interference rel " + fmt(worst_pair) + ", vs curve " + fmt(worst_curve) +
              ", control breaks by " + fmt(broken)};
}

// ---------------------------------------------------------------- check 6

inline CheckResult check_channel_relations(double tol_half = 1e-10, double tol_curve = 1e-6) {
  const AverageConfig cfg = coarse_config(12);
  const double gt2 = (1.5 / cfg.kl) * (1.5 / cfg.kl);
  double worst_half = 0.0;
  for (double s : {0.3, 2.0}) {
    const auto obs = averaged_channels(
        {Channel::HelicityPreserving, Channel::LinearPerpendicular}, s, 0.0, {}, cfg);
    worst_half = std::max(worst_half, rel_err(obs[1].L2_tot, 0.5 * obs[0].L2_tot));
    worst_half = std::max(worst_half, rel_err(obs[1].C2_tot0, 0.5 * obs[0].C2_tot0));
    worst_half = std::max(worst_half, rel_err(obs[1].L2_el, 0.5 * obs[0].L2_el));
    worst_half = std::max(worst_half, rel_err(obs[1].C2_el0, 0.5 * obs[0].C2_el0));
  }
  double worst_curve = 0.0;
  for (double s : {0.1, 1.0, 10.0}) {
    for (Channel c : {Channel::LinearParallel, Channel::HelicityFlipped}) {
      const ChannelObservables obs = averaged_channel(c, s, 0.0, {}, cfg);
      const analytic::SecondOrderCurves ref = analytic::channel_curves(c, s, gt2);
      worst_curve = std::max(worst_curve, rel_err(obs.L2_tot, ref.L2_tot));
      worst_curve = std::max(worst_curve, rel_err(obs.C2_tot0, ref.C2_tot0));
      worst_curve = std::max(worst_curve, rel_err(obs.L2_el, ref.L2_el));
      worst_curve = std::max(worst_curve, rel_err(obs.C2_el0, ref.C2_el0));
    }
  }
  const bool ok = worst_half <= tol_half && worst_curve <= tol_curve;
  return {"channel_relations", ok,
          "perpendicular = half preserved rel " + fmt(worst_half) +
              ", parallel/flipped vs curves rel " + fmt(worst_curve)};
}

// ---------------------------------------------------------------- check 7

inline CheckResult check_extrema() {
  const AverageConfig cfg = coarse_config(12);
  std::ostringstream det;
  bool ok = true;

  const double neg_lo = averaged_channel(Channel::HelicityFlipped, 0.05, 0.0, {}, cfg).L2_tot;
  const double neg_hi = averaged_channel(Channel::HelicityFlipped, 6.0, 0.0, {}, cfg).L2_tot;
  ok = ok && neg_lo > 0.0 && neg_hi < 0.0;
  det << "flipped ladder sign change (" << fmt(neg_lo) << " -> " << fmt(neg_hi) << ")";

  const auto i2 = [&](double s) {
    const ChannelObservables o = averaged_channel(Channel::HelicityPreserving, s, 0.0, {}, cfg);
    return o.L2_tot + o.C2_tot0;
  };
  const double s_i2 = golden_max(i2, 0.3, 1.5, 5e-3);
  ok = ok && s_i2 > 0.5 && s_i2 < 0.9;
  det << "; double-scattering peak at s=" << std::setprecision(4) << s_i2;

  const auto cel = [&](double s) {
    return averaged_channel(Channel::HelicityPreserving, s, 0.0, {}, cfg).C2_el0;
  };
  const double s_cel = golden_max(cel, 0.2, 0.6, 5e-7);
  ok = ok && std::abs(s_cel - 1.0 / 3.0) <= 1e-6;
  det << ", elastic interference peak at s=" << std::setprecision(9) << s_cel;

  const double a03 = enhancement(Channel::HelicityPreserving, 0.3, 20.0, cfg);
  const double a05 = enhancement(Channel::HelicityPreserving, 0.5, 20.0, cfg);
  ok = ok && a03 > 1.0 && a05 < 1.0;
  det << "; detuned alpha " << std::setprecision(5) << a03 << " -> " << a05;

  bool strong_ok = true;
  for (double delta : {12.0, 16.0, 60.0}) {
    const double s = 200.0 / (delta * delta + 1.0);  // fixed drive strength, swept detuning
    const double a = enhancement(Channel::HelicityPreserving, s, delta, cfg);
    strong_ok = strong_ok && (delta == 16.0 ? a < 1.0 : a > 1.0);
  }
  ok = ok && strong_ok;
  det << (strong_ok ? "; strong-drive dip present" : "; strong-drive dip MISSING");
  return {"interference_sign_and_extrema", ok, det.str()};
}

// ---------------------------------------------------------------- check 8

inline CheckResult check_angular(double tol_w = 1e-6, double tol_curv = 0.02) {
  AverageConfig wcfg = coarse_config(16);
  wcfg.nodes_phase = 1;  // integrands below do not involve the coupling
  struct Pair {
    int qa, qb;
    double target;
  };
  const Pair pairs[] = {{+1, +1, 2.0 / 15.0}, {+1, -1, 7.0 / 15.0}, {+1, 0, 1.0 / 15.0},
                        {0, 0, 8.0 / 15.0}};
  double worst_w = 0.0;
  for (const Pair& p : pairs) {
    const double got = configuration_average(
        [&](const SampledGeometry& geo) {
          const double st = std::sqrt(std::max(0.0, 1.0 - geo.cos_theta * geo.cos_theta));
          const SphericalTensor proj =
              transverse_projector(detail::unit_vector_ct(geo.cos_theta, st, geo.phi));
          return std::norm(proj(sph_index(p.qa), sph_index(p.qb)));
        },
        wcfg);
    worst_w = std::max(worst_w, std::abs(got - p.target));
  }

  const AverageConfig cfg = coarse_config(16);
  const double gt2 = (1.5 / cfg.kl) * (1.5 / cfg.kl);
  const double s = 1.0;
  std::vector<double> x(11), thetas(11);
  for (int i = 0; i < 11; ++i) {
    x[i] = i / 10.0;
    thetas[i] = x[i] / cfg.kl;
  }
  const ChannelObservables obs =
      averaged_channel(Channel::HelicityPreserving, s, 0.0, thetas, cfg);
  const double envelope = gt2 * analytic::R1(s) / ((4.0 + s) * analytic::P(s));
  Eigen::MatrixXd m(11, 3);
  Eigen::VectorXd b(11);
  for (int i = 0; i < 11; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = x[i] * x[i];
    m(i, 2) = std::pow(x[i], 4);
    b(i) = obs.C2_tot[i] / envelope;
  }
  const Eigen::VectorXd c = m.colPivHouseholderQr().solve(b);
  const double curv_err = std::abs(c(1) / analytic::kCrossedCurvature - 1.0);
  const double icpt_err = std::abs(c(0) / analytic::kCrossedIntercept - 1.0);
  const bool ok = worst_w <= tol_w && curv_err <= tol_curv && icpt_err <= 1e-3;
  return {"angular_weights_and_curvature", ok,
          "weights max err " + fmt(worst_w) + ", curvature rel err " + fmt(curv_err) +
              ", intercept rel err " + fmt(icpt_err)};
}

// ---------------------------------------------------------------- check 9

inline CheckResult check_truncation_scaling(double tol = 0.2) {
  const DriveParams drive = DriveParams::from_saturation(1.0, 0.0, spherical_unit(+1));
  const CartesianVec klaser = CartesianVec(0.0, 0.0, 1.0);
  std::vector<double> res;
  for (double r12 : {150.0, 1500.0}) {
    const PairGeometry geom(std::acos(0.35), 0.9, r12);
    const LiouvilleSystem sys = build_pair_system(drive, geom, klaser);
    const FactorizedGenerator fact(sys.drift);
    const auto orders = perturbative_orders(fact, sys.exchange, sys.source, 2);
    const Eigen::VectorXcd full = full_steady_state(sys.drift, sys.exchange, sys.source);
    res.push_back((full - (orders[0] + orders[1] + orders[2])).norm());
  }
  const double exponent = std::log10(res[0] / res[1]);
  const bool ok = std::abs(exponent - 3.0) <= tol;
  return {"perturbative_truncation_scaling", ok,
          "residual exponent " + fmt(exponent) + " (expect 3 +- " + fmt(tol) + ")"};
}

// --------------------------------------------------------------- check 10

inline CheckResult check_power_laws(double tol = 0.05) {
  const AverageConfig cfg = coarse_config(12);
  std::vector<double> ss(5);
  for (int i = 0; i < 5; ++i) ss[i] = 1e2 * std::pow(100.0, i / 4.0);
  std::vector<double> tot, hel, fel, fcr;
  for (double s : ss) {
    const auto obs = averaged_channels({Channel::HelicityPreserving, Channel::HelicityFlipped}, s,
                                       0.0, {}, cfg);
    tot.push_back(obs[0].L2_tot + obs[0].C2_tot0);
    hel.push_back(obs[0].L2_el);
    fel.push_back(obs[1].L2_el);
    fcr.push_back(obs[1].C2_el0);
  }
  struct Case {
    const char* label;
    const std::vector<double>* y;
    double target;
  };
  const Case cases[] = {{"total", &tot, -1.0},
                        {"elastic", &hel, -3.0},
                        {"flipped elastic ladder", &fel, -2.0},
                        {"flipped elastic interference", &fcr, -1.0}};
  bool ok = true;
  std::ostringstream det;
  for (const Case& c : cases) {
    const double m = loglog_slope(ss, *c.y);
    ok = ok && std::abs(m / c.target - 1.0) <= tol;
    det << c.label << " " << std::setprecision(4) << m << "; ";
  }
  return {"strong_saturation_power_laws", ok, det.str() + "targets -1/-3/-2/-1 +-5%"};
}

}  // namespace detail

/// Run the validation battery.  `filter` keeps checks whose name contains
/// the substring; progress lines go to `progress` as checks finish.
inline std::vector<CheckResult> run_acceptance(const std::string& filter = "",
                                               std::ostream* progress = nullptr) {
  using Runner = std::function<CheckResult()>;
  const std::pair<const char*, Runner> table[] = {
      {"fixed_geometry_order2_identity", [] { return detail::check_fixed_geometry(); }},
      {"hparh_averaged_closed_form", [] { return detail::check_averaged_closed_form(); }},
      {"enhancement_factor_values", [] { return detail::check_enhancement(); }},
      {"small_saturation_quadratic_laws", [] { return detail::check_small_saturation(); }},
      {"elastic_reciprocity", [] { return detail::check_elastic_reciprocity(); }},
      {"channel_relations", [] { return detail::check_channel_relations(); }},
      {"interference_sign_and_extrema", [] { return detail::check_extrema(); }},
      {"angular_weights_and_curvature", [] { return detail::check_angular(); }},
      {"perturbative_truncation_scaling", [] { return detail::check_truncation_scaling(); }},
      {"strong_saturation_power_laws", [] { return detail::check_power_laws(); }},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, run] : table) {
    if (!filter.empty() && std::string(name).find(filter) == std::string::npos) continue;
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    results.push_back(r);
    if (progress)
      *progress << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " - " << r.detail << "\n";
  }
  return results;
}

}  // namespace cbs
