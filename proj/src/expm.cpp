#include "motorflux/expm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace motorflux {

namespace {

// Largest 1-norm for which the degree-m approximant is accurate to double
// precision without scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const Eigen::MatrixXd& a) {
  return a.size() ? a.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
}

// U holds the odd part, V the even part: r(A) = (V - U)^{-1} (V + U).
void pade_low(const Eigen::MatrixXd& a, int degree, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b3[] = {120.0, 60.0, 12.0, 1.0};
  static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                              25200.0,    1512.0,    56.0,      1.0};
  static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                              30270240.0,    2162160.0,    110880.0,     3960.0,
                              90.0,          1.0};
  const double* b = degree == 3 ? b3 : degree == 5 ? b5 : degree == 7 ? b7 : b9;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd a2 = a * a;
  Eigen::MatrixXd power = id;
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  v.setZero(a.rows(), a.cols());
  for (int k = 0; k <= degree / 2; ++k) {
    odd += b[2 * k + 1] * power;
    v += b[2 * k] * power;
    power = power * a2;
  }
  u = a * odd;
}

void pade13(const Eigen::MatrixXd& a, Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const Eigen::MatrixXd inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double norm = one_norm(a);
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  int squarings = 0;
  if (norm <= kTheta3) {
    pade_low(a, 3, u, v);
  } else if (norm <= kTheta5) {
    pade_low(a, 5, u, v);
  } else if (norm <= kTheta7) {
    pade_low(a, 7, u, v);
  } else if (norm <= kTheta9) {
    pade_low(a, 9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    pade13(a / std::ldexp(1.0, squarings), u, v);
  }
  Eigen::MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

}  // namespace motorflux
