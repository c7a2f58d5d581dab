#pragma once

// JSON documents emitted by the command-line tool.

#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "sdc/collection.hpp"
#include "sdc/diagonalize.hpp"
#include "sdc/verifier.hpp"

namespace sdc::io {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix<double>& m);
Json vector_to_json(const Vector<double>& v);
Json to_json(const Tolerances<double>& tol);
Json to_json(const Certificate<double>& cert);
Json to_json(const VerificationReport<double>& report);

/// Per-phase wall time in milliseconds, keyed by phase name.
using Timings = std::map<std::string, double>;

/// status, P, diagonals, residuals, certificate, timings and tolerances, each
/// exactly once; absent payloads are null. `solver` records the dispatch.
Json run_report(const Diagnosis<double>& diagnosis, const Tolerances<double>& tol, const Timings& timings);

/// status and certificate only.
Json check_report(const Diagnosis<double>& diagnosis);

}  // namespace sdc::io
