#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pgv/model.hpp"

namespace pgv {

// YAML model files. Schema in docs/model_format.md.

struct LoadedModel
{
  PolyglotModel model;
  std::optional<Property> property;
};

/// Relative `file:` entries resolve against `base_dir`. Throws ModelError
/// with the offending line on schema errors, IlError-derived messages are
/// wrapped the same way.
LoadedModel parse_model_yaml(std::string_view text,
                             const std::filesystem::path & base_dir = ".");

LoadedModel load_model(const std::filesystem::path & path);

/// Name of the mode synthesized for `init.procedures`.
inline constexpr const char * kStartMode = "_start";

}  // namespace pgv
