#pragma once

#include <string>

#include "hourglass/surface.hpp"

namespace hourglass {

/// Parses the JSON surface document format. `lax` accepts unknown keys.
SurfaceSpec read_surface_spec(const std::string& text, bool lax = false);
SurfaceSpec read_surface_file(const std::string& path, bool lax = false);

/// Emits the canonical JSON document (stable key order, 17 significant
/// digits for floating coordinates, "p/q" strings in rational mode).
std::string write_surface_spec(const SurfaceSpec& spec);
void write_surface_file(const SurfaceSpec& spec, const std::string& path);

SurfaceSpec spec_of(const FlatSurface& surface);

}  // namespace hourglass
