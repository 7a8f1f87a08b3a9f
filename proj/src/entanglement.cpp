#include "optomech/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optomech/error.hpp"

namespace optomech {

namespace {

double det2(double a, double b, double c, double d) { return a * d - b * c; }

}  // namespace

double det4(const Matrix4& m) {
  // Laplace expansion along the first two rows (2x2 minors pairing).
  const double s0 = det2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
  const double s1 = det2(m(0, 0), m(0, 2), m(1, 0), m(1, 2));
  const double s2 = det2(m(0, 0), m(0, 3), m(1, 0), m(1, 3));
  const double s3 = det2(m(0, 1), m(0, 2), m(1, 1), m(1, 2));
  const double s4 = det2(m(0, 1), m(0, 3), m(1, 1), m(1, 3));
  const double s5 = det2(m(0, 2), m(0, 3), m(1, 2), m(1, 3));

  const double c5 = det2(m(2, 0), m(2, 1), m(3, 0), m(3, 1));
  const double c4 = det2(m(2, 0), m(2, 2), m(3, 0), m(3, 2));
  const double c3 = det2(m(2, 0), m(2, 3), m(3, 0), m(3, 3));
  const double c2 = det2(m(2, 1), m(2, 2), m(3, 1), m(3, 2));
  const double c1 = det2(m(2, 1), m(2, 3), m(3, 1), m(3, 3));
  const double c0 = det2(m(2, 2), m(2, 3), m(3, 2), m(3, 3));

  return s0 * c0 - s1 * c1 + s2 * c2 + s3 * c3 - s4 * c4 + s5 * c5;
}

EntanglementResult log_negativity(const Matrix4& v) {
  EntanglementResult r;
  r.det_mechanical = det2(v(0, 0), v(0, 1), v(1, 0), v(1, 1));
  r.det_optical = det2(v(2, 2), v(2, 3), v(3, 2), v(3, 3));
  r.det_correlation = det2(v(0, 2), v(0, 3), v(1, 2), v(1, 3));
  r.det_total = det4(v);
  r.sigma = r.det_mechanical + r.det_optical - 2.0 * r.det_correlation;

  double disc = r.sigma * r.sigma - 4.0 * r.det_total;
  if (disc < 0) {
    if (disc < -1e-12 * r.sigma * r.sigma) {
      std::ostringstream os;
      os << "unphysical covariance: Sigma^2 - 4 det V = " << disc;
      fail(ErrorCode::numerical, os.str());
    }
    disc = 0;
  }
  const double nu_sq = 0.5 * (r.sigma - std::sqrt(disc));
  if (!(nu_sq > 0)) {
    std::ostringstream os;
    os << "unphysical covariance: squared symplectic eigenvalue " << nu_sq;
    fail(ErrorCode::numerical, os.str());
  }
  r.nu_min = std::sqrt(nu_sq);
  r.log_negativity = std::max(0.0, -std::log(2.0 * r.nu_min));
  return r;
}

}  // namespace optomech
