#pragma once

#include <string>

#include "json.hpp"
#include "kktcert/kkt.hpp"
#include "kktcert/oracle.hpp"
#include "kktcert/problem.hpp"
#include "kktcert/witness.hpp"

namespace kktcert::report {

/// Structured documents keep keys in insertion order so that identical runs
/// produce identical bytes.
using Json = nlohmann::ordered_json;

Json to_json(const ProblemSpec& p, const kkt::KktReport& r);
Json to_json(const witness::DescentWitness& w);
Json to_json(const witness::SignWitness& w);
Json to_json(const witness::Curve& c, const witness::SlopeEstimate* slope);
Json to_json(const oracle::ProbeResult& r);

/// Serialises with shortest round-trip number formatting.
std::string dump(const Json& doc);

// Human-readable renderings; reals at 6 significant digits.
std::string format_text(const ProblemSpec& p, const kkt::KktReport& r);
std::string format_text(const witness::DescentWitness& w);
std::string format_text(const witness::SignWitness& w);
std::string format_text(const ProblemSpec& p, const witness::Curve& c,
                        const witness::SlopeEstimate* slope);
std::string format_text(const oracle::ProbeResult& r);

/// `{:.6g}` formatting used by every text report.
std::string real(double v);

}  // namespace kktcert::report
