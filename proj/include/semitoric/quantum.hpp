#pragma once

// Finite matrix quantization of the catalog systems. The sphere becomes the
// (n+1)-dimensional spin space with hbar tied to n by 2 = hbar (n+1); the
// oscillator is truncated in the Hermite basis, and only J-eigenblocks that
// fit entirely below the cutoff are retained (CompleteBlocksOnly), which
// makes the retained blocks exact rather than approximately truncated.

#include <Eigen/Dense>

#include "semitoric/errors.hpp"
#include "semitoric/spectrum.hpp"

namespace semitoric {

enum class BlockPolicy { CompleteBlocksOnly };

struct QuantizationConfig {
    int n = 1;                 // spin level, hbar = 2/(n+1)
    int oscillator_cutoff = 0; // N_max; 0 means pick from n (n + 8)
    BlockPolicy policy = BlockPolicy::CompleteBlocksOnly;

    double hbar() const { return 2.0 / (n + 1); }
    int cutoff() const { return oscillator_cutoff > 0 ? oscillator_cutoff : n + 8; }
    void validate() const {
        if (n < 1) throw ConfigError("spin level n must be >= 1");
        if (cutoff() < n + 2)
            throw CutoffTooSmall("oscillator cutoff must be at least n + 2");
    }
};

struct SpinOperators {
    Eigen::MatrixXd x, z;  // real symmetric / diagonal
    Eigen::MatrixXcd y;    // purely imaginary Hermitian
    double hbar = 0.0;
};

// Standard spin matrices on the (n+1)-dimensional space, scaled by hbar:
// z is diagonal with eigenvalues hbar (k - n/2) and [x, y] = i hbar z.
SpinOperators spin_operators(int n);

struct JHOperators {
    // Basis states are pairs (m, k): total block index m = k + l and spin
    // index k, enumerated blockwise; J is diagonal, H couples k <-> k+1
    // within a block (both real in this basis).
    Eigen::MatrixXd J, H;
    std::vector<std::pair<int, int>> basis;
    std::vector<int> block_offsets; // offset of block m in the basis
    double hbar = 0.0;
};

JHOperators build_JH_operators(const QuantizationConfig& config);

// Joint spectrum of the quantum spin-oscillator: each retained J-block is
// diagonalized by cyclic Jacobi rotations (deterministic, residual-checked).
JointSpectrum joint_spectrum(const QuantizationConfig& config);

// Product of two spin quantizations (z (x) Id, Id (x) z): the exact grid.
JointSpectrum toric_joint_spectrum(int n1, int n2);

// 1-DOF analogue: the spectrum of z on a single spin level.
std::vector<double> spin_z_spectrum(int n);

// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues
// ascending; if `vectors` is non-null it receives the orthonormal
// eigenvectors as columns.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, Eigen::MatrixXd* vectors = nullptr);

} // namespace semitoric
