#pragma once

#include <string>

#include "json.hpp"

#include "asymflat/asymptotics.hpp"
#include "asymflat/foliation.hpp"
#include "asymflat/metric.hpp"
#include "asymflat/surface.hpp"

namespace asymflat {

using nlohmann::json;

json to_json(const MetricSpec& spec);
MetricSpec spec_from_json(const json& j);
// inline JSON when the text starts with '{', otherwise a file path
MetricSpec load_spec(const std::string& source);

json to_json(const GraphSurface& s);
GraphSurface surface_from_json(const json& j);

// surface plus a metadata block
json to_json(const LeafResult& leaf);
LeafResult leaf_from_json(const json& j);

json to_json(const PowerFit& f);
json to_json(const ExponentFit& f);
json to_json(const IdentityReport& r);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace asymflat
