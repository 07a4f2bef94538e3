#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floquet/eigen_enclosure.hpp"
#include "floquet/radii.hpp"
#include "floquet/system.hpp"

namespace floquet {

struct BundleDirection {
    std::string label;                // "stable", "unstable", "trivial"; complex pairs add "_re"/"_im"
    std::size_t pair = 0;             // index into the classification
    std::vector<Interval> w;          // enclosure of the direction
};

struct BundleSample {
    double theta = 0.0;
    std::vector<Interval> base_point;  // empty without an orbit
    std::vector<BundleDirection> directions;
};

enum class Orientation { Orientable, NonOrientable, Undetermined };
const char* orientation_name(Orientation o);

struct MultiplierSign {
    int sign = 0;               // +1, -1, or 0 when not applicable
    double ratio = 0.0;         // mean componentwise ratio
    std::vector<double> ratios; // one per usable component
};

struct BundleEnclosure {
    std::vector<BundleSample> samples;
    ExponentClassification classification;
    std::vector<Interval> multipliers;           // |sigma_j|
    std::vector<Orientation> orientation;        // per pair
    std::vector<MultiplierSign> signs;           // per pair, non-rigorous
};

// Complex enclosure of Q(theta) v.
std::vector<ComplexInterval> apply_Q(const MatrixFourierSeq& Q, const Interval& theta,
                                     const std::vector<ComplexInterval>& v);

BundleSample bundle_at(double theta, const VerifiedFloquetForm& form, const OrbitEnclosure* orbit,
                       const ExponentClassification& cls);

std::vector<Interval> multipliers(const ExponentClassification& cls, const Interval& tau);

struct SignOptions {
    // Component ratios must agree to this relative tolerance.
    double rel_tol = 1e-6;
    // Components below this fraction of the largest are ignored.
    double small = 1e-8;
};

// Sign of the real Floquet multiplier of pair j from the componentwise ratio
// of Phi Q(tau) v to Q(tau) v, Phi = Q(tau) exp(R tau) on midpoints.
MultiplierSign multiplier_sign(const VerifiedFloquetForm& form, const EigenPairEnclosure& pair,
                               const SignOptions& opt = {});

BundleEnclosure sample_bundles(const VerifiedFloquetForm& form, const OrbitEnclosure* orbit,
                               const ExponentClassification& cls, int count);

std::string bundles_csv(const BundleEnclosure& b);

}  // namespace floquet
