#pragma once

#include <string>
#include <vector>

#include "stablescene/scene.hpp"

namespace stablescene {

/// Load and fully validate a scene-spec JSON file. Mesh paths resolve
/// relative to the spec file. Throws ValidationError on any schema or
/// invariant violation.
Scene load_scene(const std::string& path);

/// Write a layout file ({stage, layout{id: {quat, pos}}}). Quaternions are
/// hemisphere-canonicalized; keys are sorted; floats use 17 significant
/// digits, so save-load-save is byte identical.
void save_layout(const Layout& layout, const std::string& path);

Layout load_layout(const std::string& path);

/// Wavefront OBJ: vertices and triangular faces only (fans for larger
/// polygons), every other directive ignored.
struct ObjMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

ObjMesh load_obj(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Canonical float formatting shared by every writer (17 significant digits).
std::string format_double(double v);

/// Minimal streaming JSON writer with the canonical float format. Keys are
/// emitted in call order; callers keep that order deterministic.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(long long v);
    JsonWriter& value(size_t v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    JsonWriter& value(const Vec3& v);
    JsonWriter& value(const UnitQuat& q);

    const std::string& str() const { return out_; }

private:
    void comma();
    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_key_ = false;
};

} // namespace stablescene
