#pragma once

// Joint spectra as plain data: an hbar-tagged list of joint eigenvalue pairs
// with multiplicities and the truncation metadata needed to reproduce them.

#include <string>
#include <vector>

namespace semitoric {

struct SpectrumPoint {
    double l1 = 0.0;
    double l2 = 0.0;
    int mult = 1;
};

struct JointSpectrum {
    double hbar = 0.0;
    std::string system;
    std::vector<SpectrumPoint> points; // sorted lexicographically
    int n = 0;                          // spin level, hbar = 2/(n+1)
    int cutoff = 0;                     // oscillator cutoff N_max (0 if n/a)
    int blocks_retained = 0;
};

inline void sort_points(JointSpectrum& s) {
    std::sort(s.points.begin(), s.points.end(), [](const auto& a, const auto& b) {
        if (a.l1 != b.l1) return a.l1 < b.l1;
        return a.l2 < b.l2;
    });
}

} // namespace semitoric
