#include "pspin/coeffs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pspin/error.hpp"
#include "pspin/operators.hpp"

namespace pspin {

DriftDiffusion drift_diffusion_cartesian(const ModelParams& p, const BlochVector& r) {
  const double x = r.x, y = r.y, z = r.z;
  const double inv_n = 1.0 / p.N;
  const double rho2 = x * x + y * y;
  const double kd = p.kappa_minus - p.kappa_plus;
  const double ks = p.kappa_minus + p.kappa_plus;
  const double g = p.gamma_minus + p.gamma_plus + p.gamma_z;
  const Vec3& B = p.B;

  DriftDiffusion out;
  out.chart = Chart::cartesian;
  // transverse damping: kd x z (1 - 1/N) is the collective mean field, the
  // (ks + kappa_z)/N piece is the finite-size correction
  const double transverse = kd * z * (1.0 - inv_n) - (ks + p.kappa_z) * inv_n - g;
  out.drift.x() = B.y() * z - B.z() * y + transverse * x;
  out.drift.y() = -B.x() * z + B.z() * x + transverse * y;
  out.drift.z() = B.x() * y - B.y() * x - kd * rho2 * (1.0 - inv_n) -
                  2.0 * p.gamma_minus * (z + 1.0) - 2.0 * p.gamma_plus * (z - 1.0) -
                  2.0 * inv_n * (p.kappa_minus * (z + 1.0) + p.kappa_plus * (z - 1.0));

  const double km = p.kappa_minus, kp = p.kappa_plus, kz = p.kappa_z;
  const double side = km * (rho2 - (z + 1.0) * (z + 1.0)) - kp * (rho2 - (z - 1.0) * (z - 1.0));
  Mat3& D = out.diffusion;
  D(0, 0) = 2.0 * (km * z * (z + 1.0 - x * x) + kp * z * (z - 1.0 + x * x) + kz * y * y);
  D(1, 1) = 2.0 * (km * z * (z + 1.0 - y * y) + kp * z * (z - 1.0 + y * y) + kz * x * x);
  D(2, 2) = 2.0 * rho2 * (km * (1.0 + z) + kp * (1.0 - z));
  D(0, 1) = D(1, 0) = -2.0 * x * y * (kz + z * kd);
  D(0, 2) = D(2, 0) = x * side;
  D(1, 2) = D(2, 1) = y * side;
  return out;
}

DriftDiffusion drift_diffusion_spherical(const ModelParams& p, const SphericalPoint& pt) {
  const double eta = pt.eta, r = pt.r;
  if (!(std::abs(eta) <= 1.0 - kPoleEpsilon)) {
    throw ChartSingularity("spherical chart: |eta| = " + std::to_string(std::abs(eta)) +
                           " is within the pole guard");
  }
  if (!(r >= kRadiusEpsilon)) {
    throw ChartSingularity("spherical chart: r = " + std::to_string(r) +
                           " is within the origin guard");
  }
  const double n = p.N;
  const double e2 = eta * eta;
  const double s2 = 1.0 - e2;
  const double s = std::sqrt(s2);
  const double c = std::cos(pt.phi), sn = std::sin(pt.phi);
  const double km = p.kappa_minus, kp = p.kappa_plus, kz = p.kappa_z;
  const Vec3& B = p.B;

  DriftDiffusion out;
  out.chart = Chart::spherical;
  out.drift[0] = s * (B.x() * sn - B.y() * c) - p.gamma_minus * s2 * (eta + 2.0 / r) -
                 p.gamma_plus * s2 * (eta - 2.0 / r) + p.gamma_z * eta * s2 +
                 (kp - km) * (s2 * r + (1.0 + e2) / (n * r)) - 2.0 * eta * (kp + km) / n;
  out.drift[1] = B.z() - eta * (B.x() * c + B.y() * sn) / s;
  out.drift[2] = -p.gamma_minus * (r * (1.0 + e2) + 2.0 * eta) -
                 p.gamma_plus * (r * (1.0 + e2) - 2.0 * eta) - p.gamma_z * r * s2;

  Mat3& D = out.diffusion;
  D.setZero();
  D(0, 0) = 2.0 * s2 * (eta * (km - kp) + r * (km + kp)) / r;
  D(1, 1) = 2.0 * (e2 * r * (km + kp - kz) + eta * (km - kp) + kz * r) / (r * s2);
  D(0, 2) = D(2, 0) = s2 * (1.0 - r * r) * (kp - km);
  return out;
}

DriftDiffusion transform_to_spherical(const DriftDiffusion& cart, const BlochVector& rv, int N) {
  if (cart.chart != Chart::cartesian) {
    throw InvalidArgument("chart", "transform_to_spherical expects Cartesian coefficients");
  }
  const Vec3 v = rv.vec();
  const double x = v.x(), y = v.y(), z = v.z();
  const double n = v.norm();
  const double rho2 = x * x + y * y;
  if (n < kRadiusEpsilon || rho2 <= 0.0) {
    throw ChartSingularity("spherical chart undefined on the z axis");
  }
  const double n3 = n * n * n;
  const double n5 = n3 * n * n;

  Mat3 J;
  J.row(0) = Vec3(-z * x / n3, -z * y / n3, rho2 / n3);
  J.row(1) = Vec3(-y / rho2, x / rho2, 0.0);
  J.row(2) = v / n;

  Mat3 h_eta;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      h_eta(i, j) = -((i == 2 ? v[j] : 0.0) + (j == 2 ? v[i] : 0.0)) / n3 -
                    (i == j ? z / n3 : 0.0) + 3.0 * z * v[i] * v[j] / n5;
    }
  }
  const double rho4 = rho2 * rho2;
  Mat3 h_phi = Mat3::Zero();
  h_phi(0, 0) = 2.0 * x * y / rho4;
  h_phi(1, 1) = -2.0 * x * y / rho4;
  h_phi(0, 1) = h_phi(1, 0) = (y * y - x * x) / rho4;
  const Mat3 h_r = Mat3::Identity() / n - v * v.transpose() / n3;

  const Mat3& D = cart.diffusion;
  const double half_inv_n = 0.5 / N;
  DriftDiffusion out;
  out.chart = Chart::spherical;
  out.drift = J * cart.drift;
  out.drift[0] += half_inv_n * (D.cwiseProduct(h_eta)).sum();
  out.drift[1] += half_inv_n * (D.cwiseProduct(h_phi)).sum();
  out.drift[2] += half_inv_n * (D.cwiseProduct(h_r)).sum();
  out.diffusion = J * D * J.transpose();
  return out;
}

SphereEigen sphere_eigenvalues(const ModelParams& p, double eta) {
  if (!(std::abs(eta) < 1.0)) {
    throw InvalidArgument("eta", "sphere eigenvalues require |eta| < 1");
  }
  SphereEigen e;
  e.lambda1 = 2.0 * (1.0 - eta * eta) *
              ((1.0 + eta) * p.kappa_minus + (1.0 - eta) * p.kappa_plus);
  e.lambda2 = 2.0 * p.kappa_z + 2.0 * eta * p.kappa_minus / (1.0 - eta) -
              2.0 * eta * p.kappa_plus / (1.0 + eta);
  return e;
}

bool sphere_sufficient_condition(const ModelParams& p) noexcept {
  return p.kappa_plus + p.kappa_minus <= 2.0 * p.kappa_z;
}

namespace {

// lambda2 (1 - eta^2) / 2 = kappa_z + eta (km - kp) + eta^2 (km + kp - kz);
// it equals 2 km at eta = 1 and 2 kp at eta = -1, so only an interior vertex
// of an upward parabola can make it negative.
bool sphere_exact_condition(const ModelParams& p) noexcept {
  const double curvature = p.kappa_minus + p.kappa_plus - p.kappa_z;
  const double slope = p.kappa_minus - p.kappa_plus;
  if (curvature <= 0.0) {
    return true;
  }
  const double vertex = -slope / (2.0 * curvature);
  if (std::abs(vertex) >= 1.0) {
    return true;
  }
  return 4.0 * curvature * p.kappa_z >= slope * slope;
}

}  // namespace

bool fokker_planck_condition(const ModelParams& p, Region region) {
  p.validate();
  switch (region) {
    case Region::sphere:
      return sphere_exact_condition(p);
    case Region::ball:
      return p.kappa_plus == p.kappa_minus;
  }
  return false;
}

bool fokker_planck_condition(const ModelParams& p) {
  return fokker_planck_condition(p, p.collective_only() ? Region::sphere : Region::ball);
}

PositivityReport scan_positivity(const ModelParams& p, Region region, int resolution) {
  if (resolution < 10) {
    throw InvalidArgument("resolution", "must be >= 10");
  }
  p.validate();
  constexpr int kPhiPoints = 4;
  const int radial_points = region == Region::ball ? std::max(10, resolution / 50) : 1;

  PositivityReport rep;
  rep.resolution = resolution;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat3> es;
  for (int ir = 0; ir < radial_points; ++ir) {
    const double r = region == Region::ball ? (ir + 0.5) / radial_points : 1.0;
    for (int ie = 0; ie < resolution; ++ie) {
      const double eta = -1.0 + (2.0 * ie + 1.0) / resolution;
      for (int ip = 0; ip < kPhiPoints; ++ip) {
        const SphericalPoint pt{eta, 2.0 * std::numbers::pi * ip / kPhiPoints, r};
        const DriftDiffusion dd = drift_diffusion_spherical(p, pt);
        es.compute(dd.diffusion, Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues().minCoeff();
        if (m < rep.min_eigenvalue) {
          rep.min_eigenvalue = m;
          rep.argmin = pt;
        }
      }
    }
  }
  rep.condition_holds = rep.min_eigenvalue >= -kPsdTolerance;
  return rep;
}

Mat3 factor_diffusion(const Mat3& D, int N) {
  if (N < 1) {
    throw InvalidArgument("N", "must be >= 1");
  }
  if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("D", "diffusion matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (D + D.transpose()));
  Vec3 lambda = es.eigenvalues();
  const double min_lambda = lambda.minCoeff();
  if (min_lambda < -kPsdTolerance) {
    throw NotPositiveSemidefinite(
        "diffusion matrix has eigenvalue " + std::to_string(min_lambda) + " < 0", min_lambda);
  }
  lambda = lambda.cwiseMax(0.0);
  return es.eigenvectors() * (lambda / N).cwiseSqrt().asDiagonal();
}

CMat generator_oracle(const ModelParams& p, const BlochVector& r) {
  if (p.N > 8) {
    throw InvalidArgument("N", "generator_oracle requires N <= 8");
  }
  return full_lindbladian(p).apply(coherent_state(r, p.N).matrix());
}

namespace {

// Derivatives of alpha(r) = rho^{(x)N} with rho = (1 + sigma.r)/2. Since rho is
// affine in r, d_i rho = sigma_i / 2 and only distinct-site pairs survive in
// second derivatives.
struct CoherentDerivatives {
  CMat alpha;
  std::array<CMat, 3> first;
  std::array<std::array<CMat, 3>, 3> second;
};

CMat tensor_product(const std::vector<const CMat*>& factors) {
  CMat out = *factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    out = kron(out, *factors[k]);
  }
  return out;
}

CoherentDerivatives coherent_derivatives(const BlochVector& r, int N) {
  const CMat rho = 0.5 * (CMat::Identity(2, 2) + r.x * pauli::x() + r.y * pauli::y() +
                          r.z * pauli::z());
  std::array<CMat, 3> half_sigma;
  for (int i = 0; i < 3; ++i) {
    half_sigma[i] = 0.5 * pauli::axis(i);
  }
  const Eigen::Index dim = Eigen::Index{1} << N;
  CoherentDerivatives d;
  std::vector<const CMat*> factors(N, &rho);
  d.alpha = tensor_product(factors);
  for (int i = 0; i < 3; ++i) {
    d.first[i] = CMat::Zero(dim, dim);
    for (int s = 0; s < N; ++s) {
      factors.assign(N, &rho);
      factors[s] = &half_sigma[i];
      d.first[i] += tensor_product(factors);
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      d.second[i][j] = CMat::Zero(dim, dim);
      for (int s = 0; s < N; ++s) {
        for (int t = 0; t < N; ++t) {
          if (s == t) {
            continue;
          }
          factors.assign(N, &rho);
          factors[s] = &half_sigma[i];
          factors[t] = &half_sigma[j];
          d.second[i][j] += tensor_product(factors);
        }
      }
    }
  }
  return d;
}

}  // namespace

double verify_coefficients(const ModelParams& p, const BlochVector& r,
                           const DriftDiffusion& cart) {
  if (p.N > 6) {
    throw InvalidArgument("N", "verify_coefficients requires N <= 6");
  }
  if (!(r.norm() < 1.0)) {
    throw InvalidArgument("r", "verify_coefficients requires an interior point |r| < 1");
  }
  if (cart.chart != Chart::cartesian) {
    throw InvalidArgument("chart", "verify_coefficients expects Cartesian coefficients");
  }
  const CoherentDerivatives d = coherent_derivatives(r, p.N);
  CMat rhs = CMat::Zero(d.alpha.rows(), d.alpha.cols());
  for (int i = 0; i < 3; ++i) {
    rhs += cart.drift[i] * d.first[i];
    for (int j = 0; j < 3; ++j) {
      rhs += (0.5 / p.N) * cart.diffusion(i, j) * d.second[i][j];
    }
  }
  const CMat lhs = full_lindbladian(p).apply(d.alpha);
  return (lhs - rhs).norm();
}

double verify_coefficients(const ModelParams& p, const BlochVector& r) {
  return verify_coefficients(p, r, drift_diffusion_cartesian(p, r));
}

}  // namespace pspin
