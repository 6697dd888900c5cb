#pragma once

// Numerical thresholds shared by every module.

namespace sph::tol {

inline constexpr double kSymmetry = 1e-12;          // relative
inline constexpr double kHurwitzMargin = 1e-12;     // max Re(eig) < -margin
inline constexpr double kSchurMargin = 1e-12;       // radius < 1 - margin
inline constexpr double kLyapunovResidual = 1e-10;  // relative Frobenius residual
inline constexpr double kSqrtResidual = 1e-10;
inline constexpr double kSingularA22 = 1e-12;       // |det| relative to scale^n
inline constexpr double kLyapunovVerify = 1e-10;    // min-eig slack of supplied data
inline constexpr double kQLowerBound = 1e-12;       // Q >= I slack
inline constexpr double kGamma11Band = 1e-12;       // |gamma11 - 1| treated as 1
inline constexpr double kGamma12Zero = 1e-12;
inline constexpr double kCertificateProbe = 1e-9;   // tau offset for soundness checks
inline constexpr double kEpsilon2Factor = 0.99;     // eps2 = min(eps1, 0.99 lf/ls)
inline constexpr double kDefaultKappa = 0.9;

inline constexpr int kEigenMaxIterations = 10000;
inline constexpr int kGoldenIterations = 60;
inline constexpr int kGoldenPrescan = 64;
inline constexpr int kBisectionMaxIterations = 400;
inline constexpr double kBisectionRelTol = 1e-13;

inline constexpr double kOverflowMagnitude = 1e300;

}  // namespace sph::tol
