#include "shearlab/pks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

#include "shearlab/fft.hpp"
#include "shearlab/kernels.hpp"
#include "shearlab/mode_solver.hpp"
#include "shearlab/spectral_ops.hpp"

namespace shearlab {

std::string cause_label(BlowupCause c) {
  switch (c) {
    case BlowupCause::none:
      return "none";
    case BlowupCause::linf_threshold:
      return "linf_threshold";
    case BlowupCause::highk_energy_fraction:
      return "highk_energy_fraction";
    case BlowupCause::dt_collapse:
      return "dt_collapse";
    case BlowupCause::nonfinite:
      return "nonfinite";
  }
  return "?";
}

namespace {

BlowupCause cause_from_label(const std::string& s) {
  for (auto c : {BlowupCause::none, BlowupCause::linf_threshold, BlowupCause::highk_energy_fraction,
                 BlowupCause::dt_collapse, BlowupCause::nonfinite})
    if (cause_label(c) == s) return c;
  throw std::invalid_argument("unknown blow-up cause '" + s + "'");
}

bool all_finite(const SpectralField& F) {
  for (const auto& c : F.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

RealField real_part(const SpectralField& F) {
  RealField r(F.grid());
  for (std::size_t i = 0; i < F.size(); ++i) r[i] = F[i].real();
  return r;
}

RealField imag_part(const SpectralField& F) {
  RealField r(F.grid());
  for (std::size_t i = 0; i < F.size(); ++i) r[i] = F[i].imag();
  return r;
}

SpectralField from_parts(const RealField& re, const RealField& im) {
  SpectralField F(re.grid());
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = Complex(re[i], im[i]);
  return F;
}

BlowupVerdict trigger(double t, BlowupCause c) {
  BlowupVerdict v;
  v.triggered = true;
  v.time = t;
  v.cause = c;
  return v;
}

}  // namespace

void BlowupVerdict::merge(const BlowupVerdict& other) {
  if (triggered || !other.triggered) return;
  *this = other;
}

BlowupError::BlowupError(const BlowupVerdict& v)
    : std::runtime_error("blow-up detected (" + cause_label(v.cause) + ")"), verdict(v) {}

PKSState make_pks_state(RealField n, RealField c, double A, double t) {
  if (n.grid() != c.grid()) throw std::invalid_argument("make_pks_state: n and c live on different grids");
  if (!(A > 0.0)) throw std::invalid_argument("make_pks_state: amplitude must be positive");
  const double cm = mean(c);
  for (auto& v : c.values()) v -= cm;
  PKSState s;
  s.mass = mean(n) * Grid::volume();
  s.initial_linf = linf_norm(n);
  s.n = std::move(n);
  s.c = std::move(c);
  s.t = t;
  s.A = A;
  return s;
}

SpectralField aggregation_term(const SpectralField& n_hat, const SpectralField& c_hat, double A) {
  const Grid& g = n_hat.grid();
  std::array<SpectralField, 3> grad_hat;
  for (Axis a : kAxes)
    grad_hat[index_of(a)] = g.active(a) ? dealias(derivative(c_hat, a, 1)) : SpectralField(g);
  auto [n, gx] = inverse_pair(dealias(n_hat), grad_hat[0]);
  auto [gy, gz] = inverse_pair(grad_hat[1], grad_hat[2]);
  std::array<RealField, 3> flux{RealField(g), RealField(g), RealField(g)};
  kernels::flux_products(n.values(), gx.values(), gy.values(), gz.values(), flux[0].values(), flux[1].values(),
                         flux[2].values());
  auto [fx, fy] = transform_pair(flux[0], flux[1]);
  SpectralField div(g);
  if (g.active(Axis::x)) div += derivative(fx, Axis::x, 1);
  if (g.active(Axis::y)) div += derivative(fy, Axis::y, 1);
  if (g.active(Axis::z)) div += derivative(transform(flux[2]), Axis::z, 1);
  dealias_inplace(div);
  div *= -1.0 / A;
  return div;
}

void apply_linear_propagator(const StepRecord& rec, double A, SpectralField& n, SpectralField& c) {
  const Grid& g = n.grid();
  const double h = std::isinf(A) ? 0.0 : 0.5 * rec.dt / A;
  if (h > 0.0) kernels::coupled_heat(g, h, n.coeffs(), c.coeffs());
  if (rec.sheared) {
    kernels::shear_phase_sweep(g, rec.flow, rec.shear, rec.integral, n.coeffs());
    kernels::shear_phase_sweep(g, rec.flow, rec.shear, rec.integral, c.coeffs());
  }
  if (h > 0.0) kernels::coupled_heat(g, h, n.coeffs(), c.coeffs());
}

PKSState attempt_pks_step(const PKSState& s, const FlowSchedule& schedule, double dt, const PksParams& params,
                          StepRecord& rec) {
  const Grid& g = s.n.grid();
  rec = StepRecord{};
  rec.t0 = s.t;
  rec.dt = dt;
  if (!schedule.is_quiescent()) {
    const auto& ph = schedule.phases()[schedule.locate(s.t).index];
    rec.sheared = true;
    rec.flow = flow_axis(ph.direction);
    rec.shear = shear_axis(ph.direction);
    rec.integral = schedule.step_integral(s.t, s.t + dt, g.n(rec.shear));
  }
  if (!s.n.all_finite() || !s.c.all_finite()) {
    rec.finite = false;
    return s;
  }
  const auto [n_hat, c_hat] = transform_pair(s.n, s.c);
  const SpectralField Nv = aggregation_term(n_hat, c_hat, s.A);

  SpectralField Pn = n_hat, Pc = c_hat;
  apply_linear_propagator(rec, s.A, Pn, Pc);
  SpectralField PNn = Nv, PNc(g);
  apply_linear_propagator(rec, s.A, PNn, PNc);

  SpectralField v1n = Pn, v1c = Pc;
  for (std::size_t i = 0; i < g.size(); ++i) {
    v1n[i] += dt * PNn[i];
    v1c[i] += dt * PNc[i];
  }
  if (!all_finite(v1n)) {
    rec.finite = false;
    return s;
  }
  const SpectralField N1 = aggregation_term(v1n, v1c, s.A);

  SpectralField new_n = Pn, new_c = Pc, diff(g);
  rec.n_eff = n_hat;
  for (std::size_t i = 0; i < g.size(); ++i) {
    new_n[i] += 0.5 * dt * (PNn[i] + N1[i]);
    new_c[i] += 0.5 * dt * PNc[i];
    diff[i] = PNn[i] - N1[i];
    rec.n_eff[i] += 0.5 * dt * Nv[i];
  }
  if (!all_finite(new_n) || !all_finite(new_c)) {
    rec.finite = false;
    return s;
  }
  const double scale = std::max(l2_norm(new_n), 1e-300);
  rec.error = 0.5 * dt * l2_norm(diff) / (params.tol * scale);

  PKSState out = s;
  std::tie(out.n, out.c) = inverse_pair(new_n, new_c);
  out.t = s.t + dt;
  return out;
}

PKSState step_pks(const PKSState& s, const FlowSchedule& schedule, double dt, const PksParams& params) {
  StepRecord rec;
  PKSState out = attempt_pks_step(s, schedule, dt, params, rec);
  if (!rec.finite) throw BlowupError(trigger(s.t + dt, BlowupCause::nonfinite));
  const BlowupVerdict v = detect_blowup(out, params);
  if (v.triggered) throw BlowupError(v);
  return out;
}

double highk_energy_fraction(const SpectralField& n_hat) {
  double total = 0.0, high = 0.0;
  const Grid& g = n_hat.grid();
  n_hat.for_each_mode([&](const Complex& c, int kx, int ky, int kz) {
    if (kx == 0 && ky == 0 && kz == 0) return;
    const double e = std::norm(c);
    total += e;
    if (!dealias_keeps(g, kx, ky, kz)) high += e;
  });
  return total > 0.0 ? high / total : 0.0;
}

BlowupVerdict detect_blowup(const PKSState& s, const PksParams& params, double current_dt) {
  if (!s.n.all_finite() || !s.c.all_finite()) return trigger(s.t, BlowupCause::nonfinite);
  if (linf_norm(s.n) > params.linf_factor * s.initial_linf) return trigger(s.t, BlowupCause::linf_threshold);
  if (highk_energy_fraction(transform(s.n)) > params.highk_fraction)
    return trigger(s.t, BlowupCause::highk_energy_fraction);
  if (current_dt < params.dt_min) return trigger(s.t, BlowupCause::dt_collapse);
  return {};
}

double mass_drift(const PKSState& s) {
  const double m = mean(s.n) * Grid::volume();
  return std::abs(m - s.mass) / std::abs(s.mass);
}

double chemical_mean(const PKSState& s) { return mean(s.c); }

SpectralField remainder(const SpectralField& F, Axis a) {
  SpectralField out = F;
  const Grid& g = F.grid();
  const auto& d = g.dims();
  std::size_t idx = 0;
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int l = 0; l < d[2]; ++l, ++idx) {
        const int k = a == Axis::x ? i : (a == Axis::y ? j : l);
        if (k == 0) out[idx] = 0.0;
      }
  return out;
}

ChemicalSplit make_split(const PKSState& s, Axis flow) {
  ChemicalSplit sp;
  sp.t_r = s.t;
  sp.flow = flow;
  sp.carried = remainder(transform(s.c), flow);
  sp.d = sp.carried;
  sp.c_dev = SpectralField(s.c.grid());
  return sp;
}

void co_evolve_split(ChemicalSplit& split, const StepRecord& rec, double A) {
  if (rec.sheared && rec.flow != split.flow)
    throw std::logic_error("co_evolve_split: step flow axis differs from the split's axis");
  SpectralField zero(split.d.grid());
  apply_linear_propagator(rec, A, zero, split.d);
  SpectralField forcing = remainder(rec.n_eff, split.flow);
  apply_linear_propagator(rec, A, forcing, split.c_dev);
}

ChemicalSplit co_evolve_split(const PKSState& state_before, ChemicalSplit split, const FlowSchedule& schedule,
                              double dt, const PksParams& params) {
  StepRecord rec;
  attempt_pks_step(state_before, schedule, dt, params, rec);
  co_evolve_split(split, rec, state_before.A);
  return split;
}

double split_identity_error(const PKSState& s, const ChemicalSplit& split) {
  const SpectralField c_rem = remainder(transform(s.c), split.flow);
  const SpectralField diff = c_rem - split.c_dev - split.d;
  const double ref = l2_norm(c_rem);
  return ref > 0.0 ? l2_norm(diff) / ref : l2_norm(diff);
}

namespace {

SpectralField average_slab(const SpectralField& F, Axis a) { return F - remainder(F, a); }

}  // namespace

AverageSystem x_average_system(const PKSState& s, Axis flow) {
  return {inverse(average_slab(transform(s.n), flow)), inverse(average_slab(transform(s.c), flow))};
}

double average_equation_residual(const PKSState& prev, const PKSState& mid, const PKSState& next, Axis flow) {
  const SpectralField n_mid = transform(mid.n);
  const SpectralField lhs =
      (1.0 / (next.t - prev.t)) * average_slab(transform(next.n) - transform(prev.n), flow);
  SpectralField lap(n_mid.grid());
  for (Axis a : kAxes)
    if (n_mid.grid().active(a)) lap += derivative(n_mid, a, 2);
  const SpectralField rhs = average_slab((1.0 / mid.A) * lap + aggregation_term(n_mid, transform(mid.c), mid.A), flow);
  const double ref = l2_norm(rhs);
  const double res = l2_norm(lhs - rhs);
  return ref > 0.0 ? res / ref : res;
}

PksRun::PksRun(const FlowSchedule& schedule, PksParams params, PKSState initial)
    : schedule_(schedule), params_(params), state_(std::move(initial)), dt_next_(params.dt_init) {
  verdict_.merge(detect_blowup(state_, params_, dt_next_));
}

void PksRun::start_split(Axis flow) { split_ = make_split(state_, flow); }

bool PksRun::advance(double t_limit) {
  if (verdict_.triggered) return false;
  while (true) {
    const double want = params_.adaptive ? dt_next_ : params_.dt_init;
    const double end = next_step_end(schedule_, state_.t, t_limit, want);
    const double dt = end - state_.t;
    if (!(dt > 0.0)) return true;
    StepRecord rec;
    PKSState next = attempt_pks_step(state_, schedule_, dt, params_, rec);
    if (!rec.finite) {
      verdict_.merge(trigger(state_.t, BlowupCause::nonfinite));
      return false;
    }
    if (params_.adaptive && rec.error > 1.0) {
      ++rejected_;
      dt_next_ = dt * std::max(0.2, 0.9 * std::pow(rec.error, -0.5));
      if (dt_next_ < params_.dt_min) {
        verdict_.merge(trigger(state_.t, BlowupCause::dt_collapse));
        return false;
      }
      continue;
    }
    if (split_) co_evolve_split(*split_, rec, state_.A);
    state_ = std::move(next);
    state_.t = end;
    ++accepted_;
    if (params_.adaptive) {
      const double err = std::max(rec.error, 1e-10);
      const double fac = std::clamp(0.9 * std::pow(err, -0.35) * std::pow(err_prev_, 0.2), 0.2, 2.0);
      const bool clamped = dt < want * (1.0 - 1e-12);
      if (!clamped) dt_next_ = std::min(dt * fac, params_.dt_max);
      err_prev_ = err;
    }
    verdict_.merge(detect_blowup(state_, params_, params_.adaptive ? dt_next_ : params_.dt_init));
    if (verdict_.triggered) return false;
    if (mass_drift(state_) > 1e-8) throw std::logic_error("PKS invariant violated: mass drift above 1e-8");
    if (std::abs(chemical_mean(state_)) > 1e-10)
      throw std::logic_error("PKS invariant violated: chemical mean above 1e-10");
    double lo = 0.0, hi = 0.0;
    for (double v : state_.n.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo < -params_.tol_pos * hi) ++positivity_violations_;
    return true;
  }
}

std::string PksRun::save(const std::string& prefix, const nlohmann::json& extra) const {
  checkpoint::Bundle b;
  b.fields.emplace_back("n", state_.n);
  b.fields.emplace_back("c", state_.c);
  nlohmann::json m;
  m["t"] = state_.t;
  m["A"] = state_.A;
  m["mass"] = state_.mass;
  m["initial_linf"] = state_.initial_linf;
  m["dt_next"] = dt_next_;
  m["err_prev"] = err_prev_;
  m["accepted"] = accepted_;
  m["rejected"] = rejected_;
  m["positivity_violations"] = positivity_violations_;
  m["verdict"] = {{"triggered", verdict_.triggered}, {"time", verdict_.time}, {"cause", cause_label(verdict_.cause)}};
  if (split_) {
    m["split"] = {{"t_r", split_->t_r}, {"flow", std::string(1, axis_label(split_->flow))}};
    b.fields.emplace_back("d_re", real_part(split_->d));
    b.fields.emplace_back("d_im", imag_part(split_->d));
    b.fields.emplace_back("cdev_re", real_part(split_->c_dev));
    b.fields.emplace_back("cdev_im", imag_part(split_->c_dev));
    b.fields.emplace_back("carried_re", real_part(split_->carried));
    b.fields.emplace_back("carried_im", imag_part(split_->carried));
  }
  m["extra"] = extra;
  b.meta = m;
  return checkpoint::save_bundle(prefix, b).string();
}

PksRun PksRun::restore(const FlowSchedule& schedule, PksParams params, const std::string& sidecar,
                       nlohmann::json* extra) {
  const checkpoint::Bundle b = checkpoint::load_bundle(sidecar);
  const auto& m = b.meta;
  PKSState s;
  s.n = b.field("n");
  s.c = b.field("c");
  s.t = m.at("t").get<double>();
  s.A = m.at("A").get<double>();
  s.mass = m.at("mass").get<double>();
  s.initial_linf = m.at("initial_linf").get<double>();
  PksRun run(schedule, params, std::move(s));
  run.verdict_ = BlowupVerdict{};
  run.verdict_.triggered = m.at("verdict").at("triggered").get<bool>();
  run.verdict_.time = m.at("verdict").at("time").get<double>();
  run.verdict_.cause = cause_from_label(m.at("verdict").at("cause").get<std::string>());
  run.dt_next_ = m.at("dt_next").get<double>();
  run.err_prev_ = m.at("err_prev").get<double>();
  run.accepted_ = m.at("accepted").get<long>();
  run.rejected_ = m.at("rejected").get<long>();
  run.positivity_violations_ = m.at("positivity_violations").get<long>();
  if (m.contains("split")) {
    ChemicalSplit sp;
    sp.t_r = m["split"].at("t_r").get<double>();
    sp.flow = axis_from_label(m["split"].at("flow").get<std::string>().at(0));
    sp.d = from_parts(b.field("d_re"), b.field("d_im"));
    sp.c_dev = from_parts(b.field("cdev_re"), b.field("cdev_im"));
    sp.carried = from_parts(b.field("carried_re"), b.field("carried_im"));
    run.split_ = std::move(sp);
  }
  if (extra) *extra = m.value("extra", nlohmann::json::object());
  return run;
}

}  // namespace shearlab
