#pragma once

#include <optional>
#include <string>

#include "floquet/bundles.hpp"
#include "floquet/radii.hpp"
#include "floquet/system.hpp"

namespace floquet {

// A linear periodic problem read from disk: either an orbit (with a field)
// whose Jacobian defines A, or an explicit coefficient sequence.
struct ProblemInput {
    std::optional<OrbitEnclosure> orbit;
    MatrixFourierSeq A;
    bool conditional = false;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

ProblemInput problem_from_json(const std::string& text);
ProblemInput load_problem(const std::string& path);

OrbitEnclosure orbit_from_json(const std::string& text);
std::string orbit_to_json(const OrbitEnclosure& orbit);
VectorFieldSpec field_from_json(const std::string& text);

MatrixFourierSeq sequence_from_json(const std::string& text);
std::string sequence_to_json(const MatrixFourierSeq& seq);

FloquetCandidate candidate_from_json(const std::string& text);
std::string candidate_to_json(const FloquetCandidate& x);

VerifiedFloquetForm form_from_json(const std::string& text);
std::string form_to_json(const VerifiedFloquetForm& form);

// config_json, when nonempty, is embedded verbatim under "config".
std::string report_to_json(const VerificationReport& rep, const std::string& config_json = "");
std::string eigen_to_json(const BundleEnclosure& b, const Interval& tau);

}  // namespace floquet
