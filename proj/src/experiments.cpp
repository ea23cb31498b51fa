#include "shearlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "shearlab/calculus_checks.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/fft.hpp"
#include "shearlab/gamma_context.hpp"
#include "shearlab/mode_solver.hpp"
#include "shearlab/spectral_ops.hpp"

namespace shearlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const RunConfig& cfg, const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "# version=" << kVersion << "\n";
  out_ << "# config_hash=" << cfg.hash() << "\n";
  out_ << "# seed=" << cfg.seed << "\n";
  out_ << "# experiment=" << cfg.experiment << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            out_ << format_double(v);
          else
            out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
  out_.flush();
}

bool all_pass(const std::vector<Assertion>& a) {
  return std::all_of(a.begin(), a.end(), [](const Assertion& x) { return x.pass; });
}

json to_json(const std::vector<Assertion>& a) {
  json out = json::array();
  for (const auto& x : a) out.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
  return out;
}

namespace {

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

RateStudyOptions rate_options(const RunConfig& cfg) {
  RateStudyOptions o;
  o.n_shear = cfg.n_shear;
  o.seed = cfg.seed;
  o.dt_scale = cfg.dt_scale;
  return o;
}

LinearFit log_log_fit(const std::vector<double>& A, const std::vector<double>& v) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!(v[i] > 0.0)) continue;
    x.push_back(std::log(A[i]));
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 2) return {};
  return linear_fit(x, y);
}

}  // namespace

// ---------------------------------------------------------------- ed-sweep

std::optional<std::pair<double, double>> expected_ed_exponent(const std::string& flow) {
  if (flow == "none") return std::make_pair(-1.0, 0.02);
  if (flow == "stationary") return std::make_pair(-0.5, 0.08);
  if (flow == "rewound") return std::make_pair(-1.0 / 3.0, 0.08);
  return std::nullopt;
}

EdSweepResult run_ed_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  EdSweepResult res;
  const ShearProfile p = ShearProfile::preset(cfg.profile);
  CsvWriter rates(out_dir / "ed_rates.csv", cfg,
                  {"flow", "A", "dt", "steps", "lambda", "window_start", "window_end", "r2", "detected"});
  CsvWriter fits(out_dir / "ed_fits.csv", cfg, {"flow", "exponent", "intercept", "residual", "all_detected"});
  for (const auto& flow : cfg.flows) {
    const ExponentFit f = fit_ed_exponent(schedule_family(flow, p), cfg.amplitudes, cfg.alpha, cfg.gamma,
                                          rate_options(cfg));
    for (const auto& r : f.records)
      rates.row({flow, r.A, r.dt, r.steps, r.fit.lambda, r.fit.window_start, r.fit.window_end, r.fit.r2,
                 static_cast<long>(r.fit.detected)});
    fits.row({flow, f.exponent, f.intercept, f.residual, static_cast<long>(f.all_detected)});
    if (const auto e = expected_ed_exponent(flow)) {
      const bool ok = f.all_detected && std::abs(f.exponent - e->first) <= e->second;
      res.assertions.push_back({"ed_exponent_" + flow, ok,
                                fmt2("slope %.4f, expected %.4f", f.exponent, e->first) +
                                    fmt(" +- %.2f", e->second)});
    }
    res.fits.emplace_back(flow, f);
  }
  return res;
}

// ----------------------------------------------------------------- gliding

GlidingRecord measure_gliding_decay(const FlowSchedule& schedule, int alpha, int M, double G,
                                    const RateStudyOptions& opts) {
  const double A = schedule.amplitude();
  GlidingRecord rec;
  rec.A = A;
  const double dt = schedule.is_quiescent() ? A / 100.0 : opts.dt_scale * std::cbrt(A);
  ModeState s;
  s.alpha = alpha;
  s.A = A;
  const auto g = random_profile(opts.n_shear, opts.n_shear / 4, opts.seed);
  s.profile.resize(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) s.profile[j] = g[j] / Complex(0.0, 2.0);
  GammaContext ctx(schedule, 0.0, opts.n_shear, std::max(GammaContext::kDefaultMaxOrder, M + 1), std::max(1.0, dt));

  const double l0 = std::log(mode_norm(s.profile));
  const double z0 = z_norm_mode(s, ctx, M, G);
  std::vector<double> ts{0.0}, l2{0.0}, zd{0.0};
  rec.overshoot = 1.0;
  while (l2.back() > opts.stop_drop && rec.steps < opts.max_steps) {
    const double target = next_step_end(schedule, s.t, s.t + dt, dt);
    s = step_mode(s, schedule, target - s.t);
    s.t = target;
    ctx.advance(schedule, target);
    ++rec.steps;
    const double z = z_norm_mode(s, ctx, M, G);
    rec.overshoot = std::max(rec.overshoot, z / z0);
    ts.push_back(s.t);
    l2.push_back(std::log(mode_norm(s.profile)) - l0);
    zd.push_back(0.5 * std::log(z / z0));
  }
  rec.l2_fit = fit_decay_window(ts, l2, opts.window);
  // Z is fitted on the time window of the L2 fit: its early drop is plain
  // diffusion of the high-derivative content.
  std::vector<double> wt, wz;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= rec.l2_fit.window_start && ts[i] <= rec.l2_fit.window_end) {
      wt.push_back(ts[i]);
      wz.push_back(zd[i]);
    }
  rec.z_fit.window_start = rec.l2_fit.window_start;
  rec.z_fit.window_end = rec.l2_fit.window_end;
  if (rec.l2_fit.detected && static_cast<int>(wt.size()) >= opts.window.min_samples) {
    const LinearFit f = linear_fit(wt, wz);
    rec.z_fit.lambda = -f.slope;
    rec.z_fit.r2 = f.r2;
    rec.z_fit.detected = f.r2 >= opts.window.r2_min && f.slope < 0.0;
  }
  return rec;
}

GlidingResult run_gliding(const RunConfig& cfg, const fs::path& out_dir) {
  GlidingResult res;
  const ShearProfile p = ShearProfile::preset(cfg.profile);
  const std::string flow = cfg.flows.empty() ? "rewound" : cfg.flows.front();
  const auto family = schedule_family(flow, p);
  CsvWriter out(out_dir / "gliding.csv", cfg,
                {"flow", "A", "steps", "lambda_l2", "lambda_z", "r2_l2", "r2_z", "overshoot"});
  std::vector<double> As, l2, z;
  bool detected = true;
  for (double A : cfg.amplitudes) {
    GlidingRecord r = measure_gliding_decay(family(A), cfg.alpha, cfg.gliding.M, cfg.gliding.G, rate_options(cfg));
    out.row({flow, A, r.steps, r.l2_fit.lambda, r.z_fit.lambda, r.l2_fit.r2, r.z_fit.r2, r.overshoot});
    detected = detected && r.l2_fit.detected && r.z_fit.detected;
    As.push_back(A);
    l2.push_back(r.l2_fit.lambda);
    z.push_back(r.z_fit.lambda);
    res.max_overshoot = std::max(res.max_overshoot, r.overshoot);
    res.records.push_back(r);
  }
  res.l2_exponent = log_log_fit(As, l2);
  res.z_exponent = log_log_fit(As, z);
  res.assertions.push_back({"gliding_exponent_matches_l2",
                            detected && std::abs(res.z_exponent.slope - res.l2_exponent.slope) <= 0.1,
                            fmt2("Z slope %.4f, L2 slope %.4f", res.z_exponent.slope, res.l2_exponent.slope)});
  res.assertions.push_back(
      {"gliding_overshoot", res.max_overshoot <= 10.0, fmt("max Z(t)/Z(0) = %.4f", res.max_overshoot)});
  return res;
}

// -------------------------------------------------------------- toy model

namespace {

double laplacian_sup(const ModeState& m, fft::LineTransform& line) {
  const int n = static_cast<int>(m.profile.size());
  std::vector<Complex> c = m.profile;
  line.forward(c);
  const double a2 = double(m.alpha) * m.alpha + double(m.gamma) * m.gamma;
  for (int i = 0; i < n; ++i) {
    const int w = i <= n / 2 ? i : i - n;
    c[static_cast<std::size_t>(i)] *= -(double(w) * w + a2) / n;
  }
  line.backward(c);
  double s = 0.0;
  for (const auto& v : c) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

ToyRecord toy_contribution(const std::string& flow, const ShearProfile& p, double A, int alpha, int n_shear,
                           double dt_scale) {
  const FlowSchedule schedule = schedule_family(flow, p)(A);
  ToyRecord rec;
  rec.flow = flow;
  rec.A = A;
  const double dt = schedule.is_quiescent() ? A / 200.0 : dt_scale * std::cbrt(A);
  ModeState s;
  s.alpha = alpha;
  s.A = A;
  s.profile.assign(static_cast<std::size_t>(n_shear), Complex(1.0, 0.0));
  fft::LineTransform line(n_shear);
  double prev = laplacian_sup(s, line);
  rec.peak = prev;
  while (true) {
    const double target = next_step_end(schedule, s.t, s.t + dt, dt);
    const double h = target - s.t;
    s = step_mode(s, schedule, h);
    s.t = target;
    ++rec.steps;
    const double cur = laplacian_sup(s, line);
    rec.integral += 0.5 * (prev + cur) * h / A;
    prev = cur;
    rec.peak = std::max(rec.peak, cur);
    if (cur < 1e-10 * rec.peak || rec.steps > 50'000'000) break;
  }
  rec.t_end = s.t;
  return rec;
}

ToyResult run_toy_model(const RunConfig& cfg, const fs::path& out_dir) {
  ToyResult res;
  const ShearProfile p = ShearProfile::preset(cfg.profile);
  CsvWriter out(out_dir / "toy_model.csv", cfg, {"flow", "A", "integral", "peak_lap_sup", "t_end", "steps"});
  CsvWriter slopes(out_dir / "toy_slopes.csv", cfg, {"flow", "slope", "intercept", "rms"});
  for (const auto& flow : cfg.flows) {
    std::vector<double> As, vals;
    for (double A : cfg.amplitudes) {
      ToyRecord r = toy_contribution(flow, p, A, cfg.alpha, cfg.n_shear, cfg.dt_scale);
      out.row({flow, r.A, r.integral, r.peak, r.t_end, r.steps});
      As.push_back(A);
      vals.push_back(r.integral);
      res.records.push_back(r);
    }
    const LinearFit f = log_log_fit(As, vals);
    slopes.row({flow, f.slope, f.intercept, f.rms});
    res.slopes.emplace_back(flow, f);
    if (flow == "stationary")
      res.assertions.push_back({"toy_slope_stationary", f.slope >= 0.4, fmt("slope %.4f, need >= 0.4", f.slope)});
    if (flow == "rewound")
      res.assertions.push_back({"toy_slope_rewound", f.slope <= 0.1, fmt("slope %.4f, need <= 0.1", f.slope)});
  }
  return res;
}

// ------------------------------------------------------------ contraction

ContractionResult run_contraction(const RunConfig& cfg, const fs::path& out_dir) {
  const auto& cc = cfg.contraction;
  ContractionResult res;
  res.A = cc.A;
  const ShearProfile p = ShearProfile::preset(cfg.profile);
  const FlowSchedule schedule = FlowSchedule::rewound(cc.A, p);
  res.window = 2.0 * std::cbrt(cc.A);
  const double dt = res.window / cc.steps_per_window;

  ModeState traj;
  traj.alpha = cfg.alpha;
  traj.A = cc.A;
  const auto g = random_profile(cc.n_shear, cc.n_shear / 8, cfg.seed);
  for (double v : g) traj.profile.emplace_back(1.0 + v, 0.0);

  CsvWriter out(out_dir / "contraction.csv", cfg, {"window", "t0", "operator_norm", "trajectory_ratio"});
  for (int k = 0; k < cc.windows; ++k) {
    const double t0 = k * res.window;
    const double f = window_operator_norm(schedule, cfg.alpha, 0, cc.A, t0, res.window, cc.n_shear, dt);
    const double before = mode_norm(traj.profile);
    traj = advance_mode(std::move(traj), schedule, t0 + res.window, dt);
    const double ratio = mode_norm(traj.profile) / before;
    out.row({static_cast<long>(k), t0, f, ratio});
    res.factors.push_back(f);
    res.trajectory.push_back(ratio);
  }
  const auto [lo, hi] = std::minmax_element(res.factors.begin(), res.factors.end());
  res.kappa = 1.0 - *hi;
  res.spread = *hi - *lo;
  res.control = window_operator_norm(FlowSchedule::quiescent(cc.A), cfg.alpha, 0, cc.A, 0.0, res.window,
                                     cc.n_shear, dt);
  res.control_expected = std::exp(-double(cfg.alpha) * cfg.alpha * res.window / cc.A);
  const double hw = std::pow(double(cc.high_alpha), -2.0 / 3.0) * std::cbrt(cc.A);
  res.high_mode = window_operator_norm(schedule, cc.high_alpha, 0, cc.A, 0.0, hw, cc.high_n_shear,
                                       hw / cc.steps_per_window);

  CsvWriter extra(out_dir / "contraction_controls.csv", cfg, {"case", "alpha", "window", "factor", "reference"});
  extra.row({std::string("quiescent"), static_cast<long>(cfg.alpha), res.window, res.control, res.control_expected});
  extra.row({std::string("high_mode"), static_cast<long>(cc.high_alpha), hw, res.high_mode, std::exp(-1.0)});

  res.assertions.push_back({"contraction_windows", cc.windows >= 8, fmt("%.0f windows", cc.windows)});
  res.assertions.push_back({"contraction_kappa", res.kappa > 0.02, fmt("kappa_emp = %.5f, need > 0.02", res.kappa)});
  res.assertions.push_back({"contraction_spread", res.spread < 0.5 * res.kappa,
                            fmt2("spread %.3g vs kappa/2 = %.3g", res.spread, 0.5 * res.kappa)});
  res.assertions.push_back({"contraction_high_mode", res.high_mode <= std::exp(-1.0),
                            fmt("factor %.5f, need <= exp(-1)", res.high_mode)});
  res.assertions.push_back({"contraction_control", std::abs(res.control - res.control_expected) < 1e-6,
                            fmt2("quiescent %.8f vs %.8f", res.control, res.control_expected)});
  return res;
}

// ------------------------------------------------------------ suppression

PKSState make_gaussian_state(const Grid& g, const InitialData& init, double A) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double s2 = init.width * init.width;
  const double norm = std::pow(two_pi * s2, 1.5);
  RealField n = RealField::sample(g, [&](double x, double y, double z) {
    auto d2 = [&](double a, double c) {
      const double r = std::remainder(a - c, two_pi);
      return r * r;
    };
    const double r2 = d2(x, init.center[0]) + d2(y, init.center[1]) + d2(z, init.center[2]);
    return 1.0 + init.mass * std::exp(-r2 / (2.0 * s2)) / norm;
  });
  SpectralField ch = transform(n);
  ch.for_each_mode([](Complex& c, int kx, int ky, int kz) {
    const double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
    c = k2 > 0.0 ? c / k2 : Complex(0.0, 0.0);
  });
  return make_pks_state(std::move(n), inverse(ch), A);
}

PksParams pks_params(const PksControls& c) {
  PksParams p;
  p.dt_init = c.dt_init;
  p.dt_max = c.dt_max;
  p.dt_min = c.dt_min;
  p.tol = c.tol;
  p.linf_factor = c.linf_factor;
  p.highk_fraction = c.highk_fraction;
  return p;
}

json SuppressionRun::to_json() const {
  return {{"A", A},
          {"with_flow", with_flow},
          {"horizon", horizon},
          {"survived", survived},
          {"triggered", verdict.triggered},
          {"trigger_time", verdict.time},
          {"cause", cause_label(verdict.cause)},
          {"t_end", t_end},
          {"accepted", accepted},
          {"rejected", rejected},
          {"positivity_violations", positivity_violations},
          {"delta", delta},
          {"R1_c_start", R1_c_start},
          {"R1_c_end_a", R1_c_end_a},
          {"z_chem_start", z_chem_start},
          {"z_chem_T1a", z_chem_T1a},
          {"seconds", seconds}};
}

namespace {

const std::vector<std::string> kTimelineColumns{
    "A",     "flow", "phase", "t",     "l2_n_remainder", "l2_c_remainder", "R1", "R2", "R3",
    "Z_M",   "F",    "H_or_L", "Phi",  "linf_n",         "dt_next"};

struct SegmentPlan {
  double start = 0.0;
  double end = 0.0;
  int phase = 0;  ///< index into the cycle (0, 1, 2); -1 for the baseline
};

class SuppressionDriver {
 public:
  SuppressionDriver(const RunConfig& cfg, double A, bool with_flow, CsvWriter& timeline, const fs::path& ckpt_dir)
      : cfg_(cfg),
        A_(A),
        with_flow_(with_flow),
        timeline_(timeline),
        ckpt_dir_(ckpt_dir),
        profile_(ShearProfile::preset(cfg.profile)),
        schedule_(with_flow ? FlowSchedule::alternating(A, profile_, cfg.suppression.zeta)
                            : FlowSchedule::quiescent(A)),
        phase_len_(std::pow(A, 1.0 / 3.0 + cfg.suppression.zeta)),
        horizon_(3.0 * phase_len_),
        grid_(cfg.grid[0], cfg.grid[1], cfg.grid[2]),
        want_functional_(std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), "functional") !=
                         cfg.diagnostics.end()),
        want_z_(std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), "z_norm") != cfg.diagnostics.end()) {}

  const FlowSchedule& schedule() const { return schedule_; }
  double horizon() const { return horizon_; }

  SuppressionRun run(std::optional<PksRun> resumed = std::nullopt, int first_phase = 0) {
    const auto t0 = std::chrono::steady_clock::now();
    SuppressionRun rec;
    rec.A = A_;
    rec.with_flow = with_flow_;
    rec.horizon = horizon_;
    if (with_flow_ && want_functional_) {
      RateStudyOptions o;
      o.n_shear = cfg_.n_shear;
      o.seed = cfg_.seed;
      o.dt_scale = cfg_.dt_scale;
      rec.delta = measure_decay_rate(FlowSchedule::stationary(A_, profile_), 1, 0, o).fit.lambda;
    }
    PksRun run = resumed ? std::move(*resumed)
                         : PksRun(schedule_, pks_params(cfg_.pks), make_gaussian_state(grid_, cfg_.initial, A_));
    if (!resumed) {
      const SpectralField c = transform(run.state().c);
      rec.R1_c_start = region_energies(c).R1;
      rec.z_chem_start = z_norm(c, GammaContext(schedule_, 0.0, shear_points(0)), cfg_.suppression.M + 1,
                                cfg_.suppression.G);
    }

    std::vector<SegmentPlan> plan;
    if (with_flow_) {
      for (int p = first_phase; p < 3; ++p) plan.push_back({p * phase_len_, (p + 1) * phase_len_, p});
    } else {
      plan.push_back({run.state().t, cfg_.suppression.baseline_factor * horizon_, -1});
    }

    bool alive = true;
    for (const auto& seg : plan) {
      if (!alive) break;
      alive = run_segment(run, seg, rec);
      if (alive && with_flow_ && seg.phase == 0) rec.R1_c_end_a = region_energies(transform(run.state().c)).R1;
      if (alive && with_flow_ && seg.phase < 2) {
        json extra{{"config", cfg_.to_json()}, {"A", A_}, {"phase", seg.phase + 1}};
        char name[64];
        std::snprintf(name, sizeof name, "A%.6g_phase%d", A_, seg.phase + 1);
        run.save((ckpt_dir_ / name).string(), extra);
      }
    }
    rec.verdict = run.verdict();
    rec.t_end = run.state().t;
    rec.survived = with_flow_ && !run.verdict().triggered && run.state().t >= horizon_ * (1.0 - 1e-12);
    if (rec.survived) {
      GammaContext next(schedule_, horizon_, shear_points(3));
      rec.z_chem_T1a = z_norm(transform(run.state().c), next, cfg_.suppression.M + 1, cfg_.suppression.G);
    }
    rec.accepted = run.accepted();
    rec.rejected = run.rejected();
    rec.positivity_violations = run.positivity_violations();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
  }

 private:
  int shear_points(int phase) const {
    if (!with_flow_) return grid_.n(Axis::y);
    const auto d = schedule_.phases()[static_cast<std::size_t>(phase % 3)].direction;
    return grid_.n(shear_axis(d));
  }

  bool run_segment(PksRun& run, const SegmentPlan& seg, SuppressionRun& rec) {
    const double cap = std::max(1.0, cfg_.pks.dt_max);
    const int S = cfg_.suppression.samples_per_phase * (seg.phase < 0 ? 3 : 1);
    const int np = seg.phase < 0 ? grid_.n(Axis::y) : shear_points(seg.phase);
    const Axis flow = seg.phase < 0 ? Axis::x : flow_axis(schedule_.phases()[std::size_t(seg.phase)].direction);
    GammaContext zctx(schedule_, seg.start, np, GammaContext::kDefaultMaxOrder, cap);
    std::optional<GammaContext> fctx;
    const double t_h = std::pow(A_, 1.0 / 3.0 + cfg_.suppression.zeta / 2.0);
    const bool functional = with_flow_ && want_functional_ && seg.phase == 0;
    bool restarted = false;
    if (functional && run.state().t <= seg.start) {
      run.start_split(flow);
      fctx.emplace(schedule_, seg.start, np, GammaContext::kDefaultMaxOrder, cap);
    }

    std::vector<double> events;
    for (int q = 0; q <= S; ++q) events.push_back(seg.start + (seg.end - seg.start) * q / S);
    if (functional) events.push_back(t_h);
    std::sort(events.begin(), events.end());
    for (double target : events) {
      if (target < run.state().t) continue;
      while (run.state().t < target * (1.0 - 1e-14)) {
        if (!run.advance(target)) return false;
        zctx.advance(schedule_, run.state().t);
        if (fctx) fctx->advance(schedule_, run.state().t);
      }
      if (functional && !restarted && target == t_h) {
        run.start_split(flow);
        fctx.emplace(schedule_, run.state().t, np, GammaContext::kDefaultMaxOrder, cap);
        restarted = true;
      }
      sample(run, seg, flow, zctx, fctx ? &*fctx : nullptr, restarted, rec);
    }
    if (functional) run.clear_split();
    return true;
  }

  void sample(const PksRun& run, const SegmentPlan& seg, Axis flow, const GammaContext& zctx,
              const GammaContext* fctx, bool late, const SuppressionRun& rec) {
    const PKSState& s = run.state();
    const SpectralField n = transform(s.n), c = transform(s.c);
    const FourierRegionEnergy e = region_energies(c);
    const double z = want_z_ ? z_norm(c, zctx, cfg_.suppression.M + 1, cfg_.suppression.G) : 0.0;
    double F = 0.0;
    std::string label = "-";
    if (fctx && run.split()) {
      const FunctionalValue v = late ? functional_L(s, *run.split(), *fctx, cfg_.suppression.M, cfg_.suppression.G,
                                                    rec.delta)
                                     : functional_H(s, *run.split(), *fctx, cfg_.suppression.M, cfg_.suppression.G,
                                                    rec.delta);
      F = v.value;
      label = late ? "L" : "H";
    }
    const std::string flow_label =
        seg.phase < 0 ? "none" : direction_label(schedule_.phases()[std::size_t(seg.phase)].direction);
    timeline_.row({A_, flow_label, static_cast<long>(seg.phase), s.t, l2_norm(remainder(n, flow)),
                   l2_norm(remainder(c, flow)), e.R1, e.R2, e.R3, z, F, label, zctx.phi_weight(),
                   linf_norm(s.n), run.next_dt()});
  }

  const RunConfig& cfg_;
  double A_;
  bool with_flow_;
  CsvWriter& timeline_;
  fs::path ckpt_dir_;
  ShearProfile profile_;
  FlowSchedule schedule_;
  double phase_len_;
  double horizon_;
  Grid grid_;
  bool want_functional_;
  bool want_z_;
};

}  // namespace

SuppressionResult run_suppression(const RunConfig& cfg, const fs::path& out_dir) {
  const auto& sc = cfg.suppression;
  SuppressionResult res;
  const fs::path ckpt = out_dir / "checkpoints";
  fs::create_directories(ckpt);
  CsvWriter timeline(out_dir / "suppression_timeline.csv", cfg, kTimelineColumns);
  CsvWriter runs(out_dir / "suppression_runs.csv", cfg,
                 {"A", "flow", "horizon", "survived", "triggered", "trigger_time", "cause", "t_end", "accepted",
                  "rejected", "R1_c_start", "R1_c_end_a", "z_chem_start", "z_chem_T1a", "delta"});
  auto flow_run = [&](double A) {
    SuppressionDriver d(cfg, A, true, timeline, ckpt);
    SuppressionRun r = d.run();
    runs.row({A, std::string("alternating"), r.horizon, static_cast<long>(r.survived),
              static_cast<long>(r.verdict.triggered), r.verdict.time, cause_label(r.verdict.cause), r.t_end,
              r.accepted, r.rejected, r.R1_c_start, r.R1_c_end_a, r.z_chem_start, r.z_chem_T1a, r.delta});
    res.flow_runs.push_back(r);
    return r;
  };

  // Smallest surviving amplitude by log-bisection inside [A_low, A_high].
  std::optional<SuppressionRun> best;
  const SuppressionRun hi = flow_run(sc.A_high);
  if (hi.survived) {
    best = hi;
    const SuppressionRun lo = flow_run(sc.A_low);
    if (lo.survived) {
      best = lo;
    } else {
      double a = sc.A_low, b = sc.A_high;
      for (int it = 0; it < sc.bisections; ++it) {
        const double mid = std::sqrt(a * b);
        const SuppressionRun r = flow_run(mid);
        if (r.survived) {
          b = mid;
          best = r;
        } else {
          a = mid;
        }
      }
    }
  }
  res.found = best.has_value();
  res.A_star = best ? best->A : sc.A_high;

  SuppressionDriver base(cfg, res.A_star, false, timeline, ckpt);
  const SuppressionRun b = base.run();
  runs.row({res.A_star, std::string("none"), b.horizon, 0L, static_cast<long>(b.verdict.triggered), b.verdict.time,
            cause_label(b.verdict.cause), b.t_end, b.accepted, b.rejected, b.R1_c_start, 0.0, b.z_chem_start, 0.0,
            0.0});
  res.baseline = b;

  res.assertions.push_back({"baseline_triggers", b.verdict.triggered,
                            b.verdict.triggered ? fmt("no-flow run triggered at t = %.5g", b.verdict.time) + " (" +
                                                      cause_label(b.verdict.cause) + ")"
                                                : fmt("no trigger up to t = %.5g", b.t_end)});
  res.assertions.push_back({"flow_survives_horizon", res.found,
                            res.found ? fmt2("A* = %.5g survives to %.5g", res.A_star, best->horizon)
                                      : fmt("no surviving amplitude up to %.5g", sc.A_high)});
  const double r1 = res.found && best->R1_c_end_a > 0.0 ? best->R1_c_start / best->R1_c_end_a : 0.0;
  const double zr = res.found && best->z_chem_T1a > 0.0 ? best->z_chem_start / best->z_chem_T1a : 0.0;
  res.assertions.push_back({"R1_reduction_phase_a", r1 >= 10.0, fmt("R1 energy of c reduced %.4gx", r1)});
  res.assertions.push_back({"chemical_z_reduction", zr >= 5.0, fmt("chemical Z-norm reduced %.4gx", zr)});
  return res;
}

SuppressionRun resume_suppression(const fs::path& sidecar, const fs::path& out_dir) {
  const json meta = checkpoint::read_sidecar(sidecar);
  const json& extra = meta.at("extra");
  const RunConfig cfg = RunConfig::from_json(extra.at("config"));
  const double A = extra.at("A").get<double>();
  const int phase = extra.at("phase").get<int>();
  CsvWriter timeline(out_dir / "resume_timeline.csv", cfg, kTimelineColumns);
  const fs::path ckpt = out_dir / "checkpoints";
  fs::create_directories(ckpt);
  SuppressionDriver d(cfg, A, true, timeline, ckpt);
  PksRun run = PksRun::restore(d.schedule(), pks_params(cfg.pks), sidecar.string());
  return d.run(std::move(run), phase);
}

// ------------------------------------------------------------------ checks

ChecksResult run_checks(const RunConfig& cfg, const fs::path& out_dir) {
  ChecksResult res;
  const int trials = cfg.checks.operator_trials;
  double ad_worst = 0.0, comm_worst = 0.0;
  bool ops_ok = true;
  for (const auto& profile : cfg.checks.profiles)
    for (const auto& flow : cfg.checks.flows) {
      CheckSetup s;
      s.nx = cfg.grid[0];
      s.ny = cfg.grid[1];
      s.nz = cfg.grid[2];
      s.profile = profile;
      s.flow = flow;
      s.seed = cfg.seed;
      for (int m = 1; m <= 2; ++m)
        for (int j = 1; j <= 4; ++j) {
          CheckReport a = check_ad_expansion(j, m, trials, s);
          CheckReport c = check_gamma_commutators(j, m, trials, s);
          json ja = a.to_json(), jc = c.to_json();
          ja["profile"] = jc["profile"] = profile;
          ja["flow"] = jc["flow"] = flow;
          res.reports.push_back(ja);
          res.reports.push_back(jc);
          ad_worst = std::max(ad_worst, a.residual_max);
          comm_worst = std::max(comm_worst, c.residual_max);
          ops_ok = ops_ok && a.pass && c.pass;
        }
    }
  res.assertions.push_back({"ad_expansion", ad_worst < 1e-8, fmt("max residual %.3g", ad_worst)});
  res.assertions.push_back({"gamma_commutators", comm_worst < 1e-8, fmt("max residual %.3g", comm_worst)});

  CheckSetup ts;
  ts.flow = "log_shift";
  ts.seed = cfg.seed;
  const TransportOrderReport tr = check_gamma_transport(ts, 1.5, 0.2, 3);
  res.reports.push_back(tr.to_json());
  res.assertions.push_back({"gamma_transport_order", tr.pass, fmt("min halving ratio %.4f", tr.min_ratio)});

  const HeatReport h = check_heat_bounds(cfg.checks.trials, cfg.seed);
  res.reports.push_back(h.to_json());
  res.assertions.push_back({"heat_bounds", h.pass,
                            fmt2("kernel ratio %.8f, Duhamel ratio %.6f", h.kernel_ratio_max, h.duhamel_ratio_max)});

  const AverageReport av = check_average_contraction(cfg.checks.trials, cfg.seed);
  res.reports.push_back(av.to_json());
  res.assertions.push_back({"average_contraction", av.pass, fmt("%.0f violations", double(av.violations))});

  fs::create_directories(out_dir);
  std::ofstream(out_dir / "checks.json") << res.reports.dump(2) << "\n";
  return res;
}

bool run_experiment(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json summary{{"experiment", cfg.experiment},
               {"config_hash", cfg.hash()},
               {"version", kVersion},
               {"seed", cfg.seed},
               {"config", cfg.to_json()}};
  std::vector<Assertion> assertions;
  if (cfg.experiment == "ed-sweep") {
    const auto r = run_ed_sweep(cfg, out_dir);
    for (const auto& [flow, f] : r.fits) summary["exponents"][flow] = f.exponent;
    assertions = r.assertions;
  } else if (cfg.experiment == "gliding") {
    const auto r = run_gliding(cfg, out_dir);
    summary["l2_exponent"] = r.l2_exponent.slope;
    summary["z_exponent"] = r.z_exponent.slope;
    summary["max_overshoot"] = r.max_overshoot;
    assertions = r.assertions;
  } else if (cfg.experiment == "toy-model") {
    const auto r = run_toy_model(cfg, out_dir);
    for (const auto& [flow, f] : r.slopes) summary["slopes"][flow] = f.slope;
    assertions = r.assertions;
  } else if (cfg.experiment == "contraction") {
    const auto r = run_contraction(cfg, out_dir);
    summary["kappa_emp"] = r.kappa;
    summary["factors"] = r.factors;
    summary["trajectory"] = r.trajectory;
    assertions = r.assertions;
  } else if (cfg.experiment == "suppression") {
    const auto r = run_suppression(cfg, out_dir);
    summary["A_star"] = r.A_star;
    summary["found"] = r.found;
    for (const auto& run : r.flow_runs) summary["flow_runs"].push_back(run.to_json());
    if (r.baseline) summary["baseline"] = r.baseline->to_json();
    assertions = r.assertions;
  } else if (cfg.experiment == "checks") {
    assertions = run_checks(cfg, out_dir).assertions;
  } else {
    throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
  }
  summary["assertions"] = to_json(assertions);
  summary["pass"] = all_pass(assertions);
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";
  return all_pass(assertions);
}

}  // namespace shearlab
