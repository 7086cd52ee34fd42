#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stablescene {

/// Parameters for fixture generation; `n` sizes the stack template,
/// `objects` the random forest.
struct TemplateParams {
    int n = 3;
    int objects = 12;
    uint64_t seed = 0;
};

std::vector<std::string> template_names();

/// Deterministic scene-spec JSON for a named template. Templates inject
/// documented physical inconsistencies (float heights, sink depths, overlap
/// offsets) for the optimizer to repair. Throws std::invalid_argument on an
/// unknown template name.
std::string gen_scene_json(const std::string& template_name, const TemplateParams& params);

void gen_scene_file(const std::string& template_name, const TemplateParams& params,
                    const std::string& out_path);

} // namespace stablescene
