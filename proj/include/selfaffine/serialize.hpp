#pragma once

// JSON documents for systems, projections, measures and result records.
// Non-finite numbers are written as null.

#include "json.hpp"
#include "selfaffine/constructions.hpp"
#include "selfaffine/geometry.hpp"
#include "selfaffine/ifs.hpp"
#include "selfaffine/measures.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/projection.hpp"

namespace selfaffine {

using Json = nlohmann::ordered_json;

// {"dimension": d, "maps": [{"linear": [row-major], "translation": [...]}]}
Json to_json(const IfsSystem& sys);
IfsSystem system_from_json(const Json& doc);

// Rows as nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& doc);

// A preset name ("identity", "coord:k", "sum-block") or a d x d nested array.
ProjectionMap projection_from_json(const Json& doc, std::size_t dimension);

// {"probs": [...]} or {"transition": [[...], ...]}.
Json to_json(const Measure& mu);
Measure measure_from_json(const Json& doc);

Json to_json(const PressureEstimate& est);
Json to_json(const DimensionEstimate& est);
Json to_json(const LyapunovEstimate& est);
Json to_json(const LocalDimension& est);
// Samples are replaced by a 200-bin histogram above 10^4 entries.
Json to_json(const OrbitLimitReport& report);
Json to_json(const BoxCountSeries& series);
Json to_json(const ContractionReport& report);
Json to_json(const DominationReport& report);
Json to_json(const PressureDrop& drop);
Json to_json(const SumsetSystem& sumset);
// {"d1", "d2", "left": [d1 x d1 ...], "right": [d2 x d2 ...], "translation_seed"}
Json to_json(const TensorFactors& factors);
TensorFactors tensor_factors_from_json(const Json& doc);

// Finite numbers as is, anything else as null.
Json number(double x);

}  // namespace selfaffine
