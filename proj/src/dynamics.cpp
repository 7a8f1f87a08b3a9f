#include "optomech/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "optomech/error.hpp"
#include "optomech/params.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

DriftMatrix drift_matrix(double omega_m, double gamma_m, double kappa, double delta,
                         double coupling) {
  DriftMatrix a;
  a.m(0, 1) = omega_m;
  a.m(1, 0) = -omega_m;
  a.m(1, 1) = -gamma_m;
  a.m(1, 2) = coupling;
  a.m(2, 2) = -kappa;
  a.m(2, 3) = delta;
  a.m(3, 2) = -delta;
  a.m(3, 3) = -kappa;
  a.m(3, 0) = coupling;
  return a;
}

DriftMatrix drift_matrix(const SteadyState& ss, const SystemParams& params) {
  return drift_matrix(params.mechanical_freq, params.mechanical_damping, params.cavity_decay,
                      ss.delta, ss.coupling);
}

Matrix4 matrix_exponential(const Matrix4& a) {
  // Degree-13 Pade coefficients and the matching 1-norm bound theta_13 (Higham 2005).
  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Matrix4 s = a * std::ldexp(1.0, -squarings);

  const Matrix4 id = Matrix4::Identity();
  const Matrix4 s2 = s * s;
  const Matrix4 s4 = s2 * s2;
  const Matrix4 s6 = s4 * s2;
  const Matrix4 u_inner = s6 * (b[13] * s6 + b[11] * s4 + b[9] * s2) + b[7] * s6 + b[5] * s4 +
                          b[3] * s2 + b[1] * id;
  const Matrix4 u = s * u_inner;
  const Matrix4 v = s6 * (b[12] * s6 + b[10] * s4 + b[8] * s2) + b[6] * s6 + b[4] * s4 +
                    b[2] * s2 + b[0] * id;

  Matrix4 r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix4 matrix_exponential(const DriftMatrix& a, double t) {
  if (!(t >= 0)) fail(ErrorCode::domain, "matrix_exponential requires t >= 0");
  if (t == 0) return Matrix4::Identity();
  return matrix_exponential(Matrix4(a.m * t));
}

StabilityReport stability(const DriftMatrix& a) {
  Eigen::EigenSolver<Matrix4> solver(a.m, false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::numerical, "drift matrix eigenvalue iteration did not converge");
  }
  StabilityReport r;
  r.max_real_part = solver.eigenvalues().real().maxCoeff();
  r.margin = 1e-9 * a.m.norm();
  r.stable = r.max_real_part < -r.margin;
  return r;
}

double resolvent_entry_44(const DriftMatrix& a, double gamma_c) {
  if (!(gamma_c > 0)) fail(ErrorCode::domain, "resolvent requires gamma_c > 0");
  const Matrix4 shifted = gamma_c * Matrix4::Identity() - a.m;
  Eigen::FullPivLU<Matrix4> lu(shifted);
  if (!lu.isInvertible()) fail(ErrorCode::internal, "singular resolvent (gamma_c I - A)");
  const Eigen::Vector4d x = lu.solve(Eigen::Vector4d::Unit(3));
  return x(3);
}

std::string format_matrix(const Matrix4& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace optomech
