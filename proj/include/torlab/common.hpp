#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace torlab {

using cd = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<cd>;

inline constexpr double kPi = 3.14159265358979323846;
inline const cd kI{0.0, 1.0};

enum class Err {
    NonPositivePeriod,
    UnsupportedDimension,
    Precondition,
    DiscMismatch,
    BidegreeOverflow,
    BidegreeUnderflow,
    ShapeMismatch,
    EigenFailure,
    NotCoexact,
    NotClosed,
    EmptySpectrum,
    HodgeUnavailable,
    ExtensionNotAdmissible,
    NotPrimitive,
    CurvatureNotInvertible,
    StepTooSmall,
    RankJump,
    SingularBlock,
    StencilQuadratureFailure,
    ConfigInvalid,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

// Hermitian part, used where a matrix is symmetric up to roundoff
inline MatC herm(const MatC& A) { return 0.5 * (A + A.adjoint()); }

// Smallest eigenvalue of the Hermitian part
double min_eig(const MatC& A);

}  // namespace torlab
