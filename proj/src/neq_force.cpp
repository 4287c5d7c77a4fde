#include "ote/neq_force.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/smatrix_cache.hpp"

namespace ote {

void ThermalState::validate() const {
  for (double t : {T1, T2, Te})
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ValidationError(fmt::format("temperatures must be finite and >= 0 (got {}, {}, {})", T1, T2, Te));
}

double occupation(double omega, double T) {
  if (T <= 0.0) return 0.0;
  return 1.0 / std::expm1(phys::hbar * omega / (phys::k_B * T));
}

double thermal_N(double omega, double T) { return phys::hbar * omega * (0.5 + occupation(omega, T)); }

double population_diff(double omega, double Ti, double Tj) {
  if (Ti == Tj) return 0.0;
  return occupation(omega, Ti) - occupation(omega, Tj);
}

Projector make_projector(const CVec& kz, const std::vector<bool>& propagating, Sector sector, int power) {
  if (static_cast<std::size_t>(kz.size()) != propagating.size())
    throw ContractViolation("projector: kz and sector mask differ in size");
  if (power != -1 && power != 2) throw ContractViolation("projector power must be -1 or 2");
  Projector p{sector, power, CVec::Zero(kz.size())};
  for (Eigen::Index i = 0; i < kz.size(); ++i) {
    const bool in_sector = propagating[i] == (sector == Sector::propagating);
    if (in_sector) p.weights(i) = power == 2 ? kz(i) * kz(i) : 1.0 / kz(i);
  }
  return p;
}

ProjectorSet make_projectors(const CVec& kz, const std::vector<bool>& propagating) {
  return {make_projector(kz, propagating, Sector::propagating, -1),
          make_projector(kz, propagating, Sector::evanescent, -1),
          make_projector(kz, propagating, Sector::propagating, 2),
          make_projector(kz, propagating, Sector::evanescent, 2)};
}

CMat f_alpha(const CMat& R, int alpha, const ProjectorSet& p) {
  const auto n = p.pw_m1.weights.size();
  if (R.rows() != n || R.cols() != n) throw ContractViolation("f_alpha: operator and projectors differ in size");
  if (alpha == -1) {
    const auto pw = p.pw_m1.weights.asDiagonal();
    const auto ew = p.ew_m1.weights.asDiagonal();
    CMat out = R * pw * R.adjoint();
    out = -out;
    out.diagonal() += p.pw_m1.weights;
    out += R * ew;
    out -= ew * R.adjoint();
    return out;
  }
  if (alpha == 2) {
    const auto pw = p.pw_2.weights.asDiagonal();
    const auto ew = p.ew_2.weights.asDiagonal();
    CMat out = R.adjoint() * pw * R;
    out.diagonal() += p.pw_2.weights;
    out += R.adjoint() * ew;
    out += ew * R;
    return out;
  }
  throw ContractViolation(fmt::format("f_alpha: alpha must be -1 or 2 (got {})", alpha));
}

namespace {

Eigen::PartialPivLU<CMat> cavity_lu(const CMat& a, const CMat& b, const char* name) {
  const auto n = a.rows();
  Eigen::PartialPivLU<CMat> lu(CMat::Identity(n, n) - a * b);
  if (!(lu.rcond() > 1e-300)) throw ResonanceError(fmt::format("{}: (1 - R R') is singular", name));
  return lu;
}

// U X U^dagger with U = lu^-1
CMat sandwich(const Eigen::PartialPivLU<CMat>& lu, const CMat& x) {
  const CMat a = lu.solve(x);
  return lu.solve(a.adjoint()).adjoint();
}

cplx trace_product(const CMat& a, const CMat& b) { return a.cwiseProduct(b.transpose()).sum(); }

cplx trace_diag(const CMat& a, const CVec& d) { return (a.diagonal().array() * d.array()).sum(); }

}  // namespace

std::pair<CMat, CMat> cavity_operators(const CMat& R1_plus, const CMat& R2_minus) {
  const auto n = R1_plus.rows();
  const CMat I = CMat::Identity(n, n);
  return {cavity_lu(R1_plus, R2_minus, "U12").solve(I), cavity_lu(R2_minus, R1_plus, "U21").solve(I)};
}

CMat composite_R12(const CMat& R1_minus, const CMat& T1_minus, const CMat& T1_plus, const CMat& U21,
                   const CMat& R2_minus) {
  return R1_minus + T1_minus * U21 * R2_minus * T1_plus;
}

void GratingPair::validate(bool need_body1_transmission) const {
  body1.validate();
  body2.validate();
  if (body1.period != body2.period)
    throw ValidationError(fmt::format("the two gratings must share one period (got {} and {})", body1.period,
                                      body2.period));
  if (!body1.cover.is_vacuum() || !body2.cover.is_vacuum())
    throw ValidationError("the gap between the bodies must be vacuum (zone 1 of both gratings)");
  if (need_body1_transmission && body1.semi_infinite())
    throw ValidationError("body 1 must have finite thickness for the non-equilibrium term");
  if (!body1.semi_infinite() && !body1.outer.is_vacuum())
    throw ValidationError("body 1 must be surrounded by the vacuum environment (zone 4)");
  if (!body2.semi_infinite() && !body2.outer.is_vacuum())
    throw ValidationError("body 2 must be surrounded by the vacuum environment (zone 4)");
}

SMatrix body_smatrix(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& options,
                     SMatrixCache* cache) {
  if (!cache) return assemble_smatrix(basis, g, options);
  const CacheKey key{g.hash(),  basis.frequency().is_imaginary(), basis.frequency().value(), basis.kx(),
                     basis.ky(), basis.truncation(), static_cast<int>(options.branch)};
  if (auto hit = cache->find(key)) return *hit;
  SMatrix s = assemble_smatrix(basis, g, options);
  cache->insert(key, s);
  return s;
}

ModeOperators build_mode_operators(const ModeBasis& basis, const GratingPair& bodies, double d, int mbar,
                                   const FmmOptions& options, SMatrixCache* cache) {
  const int M = basis.truncation();
  if (mbar < 0 || mbar > M) throw ContractViolation(fmt::format("need 0 <= mbar <= M (got {}, {})", mbar, M));
  if (!(d > 0.0)) throw ValidationError(fmt::format("distance must be positive (got {})", d));

  // Body 1 is computed with its gap side as zone 1 and flipped into the common frame.
  const SMatrix s1 = mirror_smatrix(body_smatrix(basis, bodies.body1, options, cache)).central_block(M, mbar);
  const SMatrix own2 = body_smatrix(basis, bodies.body2, options, cache).central_block(M, mbar);

  ModeOperators ops;
  ops.omega = basis.frequency().value();
  const int N = basis.orders();
  std::vector<int> idx;
  for (int p = 0; p < 2; ++p)
    for (int n = -mbar; n <= mbar; ++n) idx.push_back(p * N + M + n);
  CVec kz(idx.size());
  ops.propagating.resize(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const int order = idx[j] % N;
    kz(j) = basis.kz_vacuum()(order);
    ops.propagating[j] = basis.propagating(order);
  }
  ops.kz = kz;
  const SMatrix s2 = translate_smatrix(own2, kz, d);

  ops.R1_plus = s1.r_plus();
  if (!s1.transmission_masked()) {
    ops.R1_minus = s1.r_minus();
    ops.T1_plus = s1.t_plus();
    ops.T1_minus = s1.t_minus();
  }
  ops.R2_minus = s2.r_minus();
  if (!s2.transmission_masked()) ops.T2_minus = s2.t_minus();
  return ops;
}

IntegrandValue delta_integrand(const ModeOperators& ops, const ThermalState& thermal) {
  const double n_e1 = population_diff(ops.omega, thermal.Te, thermal.T1);
  const double n_21 = population_diff(ops.omega, thermal.T2, thermal.T1);
  if (n_e1 == 0.0 && n_21 == 0.0) return {};
  if (!ops.T1_plus || !ops.T1_minus || !ops.R1_minus)
    throw ContractViolation("the non-equilibrium term needs the transmission blocks of body 1");

  const CMat& R1p = ops.R1_plus;
  const CMat& R2m = ops.R2_minus;
  const CMat& T1p = *ops.T1_plus;
  const CMat& T1m = *ops.T1_minus;
  const ProjectorSet P = make_projectors(ops.kz, ops.propagating);
  const CVec& pw_m1 = P.pw_m1.weights;
  const CVec& pw_2 = P.pw_2.weights;

  const auto lu12 = cavity_lu(R1p, R2m, "U12");
  const auto lu21 = cavity_lu(R2m, R1p, "U21");

  // f_2(R1+) - T1-^dag P2pw T1-
  const CMat g1 = f_alpha(R1p, 2, P) - T1m.adjoint() * pw_2.asDiagonal() * T1m;
  const CMat g2 = f_alpha(R2m, 2, P);

  cplx first = 0.0;
  if (ops.T2_minus) {
    const CMat& T2m = *ops.T2_minus;
    first += trace_product(sandwich(lu21, T2m * pw_m1.asDiagonal() * T2m.adjoint()), g1);
  }
  CMat b = sandwich(lu12, T1p * pw_m1.asDiagonal() * T1p.adjoint());
  b.diagonal() -= pw_m1;
  first += trace_product(b, g2);
  const CMat R12 = ops.R1_minus.value() + T1m * lu21.solve(R2m * T1p);
  const CMat c = R2m * pw_m1.asDiagonal() * R2m.adjoint() - R12 * pw_m1.asDiagonal() * R12.adjoint();
  first += trace_diag(c, pw_2);

  cplx second = 0.0;
  if (n_21 != 0.0) {
    CMat e = f_alpha(R2m, -1, P);
    if (ops.T2_minus) e -= *ops.T2_minus * pw_m1.asDiagonal() * ops.T2_minus->adjoint();
    second = trace_product(sandwich(lu21, e), g1);
  }
  const cplx total = -phys::hbar * (n_e1 * first + n_21 * second);
  return {total.real(), total.imag()};
}

IntegrandValue eq_integrand(const ModeOperators& ops) {
  const CVec kappa = (ops.kz * cplx(0.0, -1.0)).eval();  // kz = i kappa on the imaginary axis
  const CMat& R1 = ops.R1_plus;
  const CMat& R2 = ops.R2_minus;
  const auto lu = cavity_lu(R1, R2, "U12");
  const CMat x = lu.solve(R1);  // U12 R1
  const cplx t = trace_product(x, kappa.asDiagonal() * R2) + trace_product(x, R2 * kappa.asDiagonal());
  return {-t.real(), -t.imag()};
}

IntegrandValue eq_integrand_imagfreq(double xi, double kx, double ky, const GratingPair& bodies, double d,
                                     Truncation truncation, const FmmOptions& options, SMatrixCache* cache) {
  const ModeBasis basis(Frequency::imaginary(xi), kx, ky, truncation.M, bodies.body1.period);
  return eq_integrand(build_mode_operators(basis, bodies, d, truncation.mbar, options, cache));
}

}  // namespace ote
