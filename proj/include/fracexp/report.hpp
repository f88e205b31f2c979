#pragma once

#include "fracexp/applications.hpp"
#include "fracexp/fbm.hpp"
#include "fracexp/taylor.hpp"

#include "json.hpp"

#include <string>

namespace fracexp {

using Json = nlohmann::ordered_json;

Json to_json(const SeriesResult& s);
SeriesResult series_from_json(const Json& j);

Json to_json(const MertonResult& m);
Json to_json(const CirExpansion& c);
Json to_json(const CirMcCheck& c);
Json to_json(const LognormalSeries& s);
Json to_json(const FbmEnsemble& ens);

/// Indented JSON text; numbers are printed in shortest round-trip form.
std::string dump_json(const Json& j);

/// Plain-text rendering. Scalars print as "key: value"; numeric arrays of equal
/// length inside one object are laid out as columns of a table.
std::string render_table(const Json& j);

/// CSV rendering: per object, one row of its numeric scalars and one block per group
/// of equal-length arrays. Rows start with the object path and the row index.
/// The echoed "config" object is left out.
std::string render_csv(const Json& j);

}  // namespace fracexp
