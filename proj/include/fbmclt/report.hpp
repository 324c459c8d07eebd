#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fbmclt/adaptive.hpp"
#include "fbmclt/cltlab.hpp"
#include "fbmclt/quad.hpp"
#include "fbmclt/sampler.hpp"

namespace fbmclt {

/// Version of the JSON layouts in docs/schema/. Bumped on any incompatible
/// change of field names or types.
inline constexpr const char* kSchemaVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// {value, error, n_evals, method}
Json to_json(const QuadResult& r);
Json to_json(const Estimate& e);
Json to_json(const McReport& r);
Json to_json(const FbmPathSet& p);
Json to_json(const WindingStats& w);

/// One row per (k, t); columns documented in docs/formats.md.
void write_csv(std::ostream& os, const McReport& r);
/// Single-row table value,error,n_evals,method.
void write_csv(std::ostream& os, const QuadResult& r, const std::string& label = "");

}  // namespace fbmclt
