#pragma once

#include "meshcrit/eigensolve.hpp"
#include "meshcrit/perimetric.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace meshcrit {

/// One ground-state evaluation. For lambda = 0 the physical charge is
/// infinite and Z, energy and ionization are NaN.
struct EnergyRecord {
    double Z = 0.0;
    double lambda = 0.0;
    MeshSpec spec;
    double energy_scaled = 0.0;  ///< E~ = E / Z^2
    double energy = 0.0;         ///< E = Z^2 E~
    double ionization = 0.0;     ///< I = E + Z^2 / 2
    double residual = 0.0;
    int iterations = 0;
    double wall_time_seconds = 0.0;
    bool converged = false;
    int stab_digits = -1;  ///< only filled by scans
    std::string error;     ///< non-empty when the evaluation failed outright
};

/// Reference values used across the tools and tests.
inline constexpr double kReferenceCriticalCharge = 0.91102822407725573;
inline constexpr std::array<int, 3> kDefaultMesh{40, 40, 30};

/// h = (hx, hy, hz) tuned per charge range; applies to the scaled coordinates.
std::array<double, 3> default_scales(double Z);

/// Mesh (40, 40, 30) with the Z-dependent default scales.
MeshSpec default_mesh(double Z);

/// E~(lambda) on the scaled Hamiltonian. `warm` seeds the eigensolver;
/// `vector_out` receives the converged eigenvector for the next warm start.
EnergyRecord ground_state_energy_scaled(const MeshSpec& spec, double lambda, const StateVector* warm = nullptr,
                                        const EigenOptions& options = {}, StateVector* vector_out = nullptr);

/// E(Z) = Z^2 E~(1/Z); the mesh scales refer to the scaled frame.
EnergyRecord ground_state_energy(const MeshSpec& spec, double Z, const StateVector* warm = nullptr,
                                 const EigenOptions& options = {}, StateVector* vector_out = nullptr);

/// I(Z) = E(Z) + Z^2 / 2.
double ionization_energy(const MeshSpec& spec, double Z, const EigenOptions& options = {});

/// E_th = -Z^2 / 2, the one-electron threshold.
double threshold_energy(double Z);

/// Number of leading decimals on which a and b agree after rounding both to
/// d places, for every d up to the returned value (max 15).
int stabilized_digits(double a, double b);

struct CriticalEvaluation {
    double lambda = 0.0;
    double energy_scaled = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct CriticalResult {
    double z_critical = 0.0;
    double lambda_critical = 0.0;
    double energy_scaled = 0.0;     ///< E~ at lambda_critical
    double energy = 0.0;            ///< E(Z_cr)
    double final_ionization = 0.0;  ///< I(Z_cr) = Z_cr^2 (E~ + 1/2)
    double threshold_energy = 0.0;  ///< -Z_cr^2 / 2
    std::vector<CriticalEvaluation> history;
    MeshSpec spec;
    bool converged = false;
    bool solver_failed = false;  ///< an eigen-solve did not converge; history is partial
};

struct CriticalOptions {
    double lambda_lo = 1.05;
    double lambda_hi = 1.12;
    double tol_ionization = 1e-11;  ///< on g(lambda) = E~ + 1/2
    double tol_lambda = 1e-13;
    int max_evaluations = 60;
};

/// Scaled energy as a function of lambda.
using ScaledEnergyFunction = std::function<CriticalEvaluation(double lambda)>;

/// Root of g(lambda) = E~(lambda) + 1/2 by secant steps safeguarded with
/// bisection inside a sign-changing bracket. Stops at |g| <= tol_ionization
/// or a bracket narrower than tol_lambda and returns the evaluated point with
/// the smallest |g|. Throws BracketError when g does not change sign.
CriticalResult find_critical_charge(const ScaledEnergyFunction& energy, const CriticalOptions& options);

/// Eigenvectors of earlier evaluations keyed by lambda. A root search jumps
/// across the threshold, where the ground state changes character, so the
/// closest earlier lambda is a better start than the latest one.
class WarmStartPool {
  public:
    void add(double lambda, StateVector v);
    /// Vector stored for the lambda closest to `lambda`, or nullptr when empty.
    const StateVector* nearest(double lambda) const;

  private:
    std::map<double, StateVector> vectors_;
};

/// Mesh version: every evaluation warm-starts from the eigenvector of the
/// closest lambda evaluated so far.
CriticalResult find_critical_charge(const MeshSpec& spec, const CriticalOptions& options,
                                    const EigenOptions& eigen = {});

/// One record per (mesh size, scale) combination, sorted by (Nx, Ny, Nz, hx, hy, hz).
/// stab_digits compares every record with the largest mesh of the same
/// scales; the largest mesh itself is compared with the next largest.
/// Single-mesh groups report -1. Failures are flagged, not thrown.
std::vector<EnergyRecord> convergence_scan(double Z, const std::vector<std::array<int, 3>>& sizes,
                                           const std::vector<std::array<double, 3>>& scales,
                                           const EigenOptions& options = {});

struct NearCriticalScan {
    std::vector<EnergyRecord> records;
    std::vector<double> second_differences;  ///< E[i-1] - 2 E[i] + E[i+1], i = 1 .. n-2
};

/// E(Z) on a uniform grid Z_lo .. Z_hi, warm-started in sequence.
NearCriticalScan scan_near_critical(const MeshSpec& spec, double z_lo, double z_hi, int n_points,
                                    const EigenOptions& options = {});

} // namespace meshcrit
