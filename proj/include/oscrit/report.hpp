#pragma once

// JSON and CSV serialisation of criterion, oscillation and comparison reports.
// Keys keep insertion order so output is byte-stable for a given input.

#include <ostream>
#include <span>
#include <string>

#include "json.hpp"
#include "oscrit/kamenev.hpp"
#include "oscrit/ode.hpp"
#include "oscrit/riccati.hpp"

namespace oscrit::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "oscrit 1.0.0";

Json to_json(const kamenev::Verdict& v);
Json to_json(const coeffs::SignReport& s);
Json to_json(const kamenev::TheoremReport& r);
Json to_json(const kamenev::Policy& p);
Json to_json(const ode::Controls& c);
Json to_json(const ode::OscillationReport& r);
Json to_json(const riccati::ComparisonReport& r);

/// Writes "t,S,criterion_id,alpha" rows for every trajectory in the reports.
void write_trajectories_csv(std::ostream& os, std::span<const kamenev::TheoremReport> reports);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string csv_field(const std::string& s);
/// Shortest round-trip decimal form.
std::string number(double v);

}  // namespace oscrit::report
