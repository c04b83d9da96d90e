#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "turnpike/horizon_solver.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/steady_solver.hpp"
#include "turnpike/subspace_lab.hpp"
#include "turnpike/system_model.hpp"
#include "turnpike/turnpike_metrics.hpp"

namespace turnpike::io {

using Json = nlohmann::ordered_json;

/// Version of every JSON document written by the tools.
inline constexpr int kSchemaVersion = 1;

Json to_json(const Matrix& m);           ///< array of rows
Json vector_json(const Vector& v);       ///< flat array
Json to_json(const ComplexVector& v);    ///< array of [re, im]
Json to_json(const std::vector<std::complex<double>>& v);

/// Inverse conversions; `where` names the field in error messages.
Matrix matrix_from_json(const Json& j, const std::string& where);
Vector vector_from_json(const Json& j, const std::string& where);

Json to_json(const PdeSpec& spec);
Json to_json(const SystemSpec& sys);
Json to_json(const SubspaceReport& report);
Json to_json(const PredicateResult& result);
Json to_json(const SteadySolution& steady);
Json to_json(const RiccatiResult& result);
Json to_json(const TurnpikeFit& fit);
Json to_json(const CTurnpikeReport& report);
Json to_json(const VelocityReport& report);

}  // namespace turnpike::io
