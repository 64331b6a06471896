#pragma once

#include <aerobench/core.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aerobench {

/// On-disk precision of a real-valued array. Values are always held as
/// double in memory; a Float32 array only ever holds float-representable
/// values so writing it back is bit-exact.
enum class ScalarType
{
    Float32,
    Float64,
};

/// Width of connectivity/offset arrays as they were read (or should be written).
enum class IndexType
{
    Int32,
    Int64,
};

struct DataArray
{
    std::string name;
    int components = 1;
    ScalarType type = ScalarType::Float64;
    std::vector<double> values;

    std::size_t tuples() const { return components > 0 ? values.size() / static_cast<std::size_t>(components) : 0; }
    double at(std::size_t tuple, int component = 0) const
    {
        return values[tuple * static_cast<std::size_t>(components) + static_cast<std::size_t>(component)];
    }
    Vec3 vec3(std::size_t tuple) const
    {
        const std::size_t b = tuple * 3;
        return {values[b], values[b + 1], values[b + 2]};
    }
};

/// Ordered collection of named arrays (insertion order is preserved on write).
class FieldSet
{
public:
    const DataArray* find(std::string_view name) const
    {
        auto it = std::find_if(arrays_.begin(), arrays_.end(), [&](const DataArray& a) { return a.name == name; });
        return it == arrays_.end() ? nullptr : &*it;
    }

    bool contains(std::string_view name) const { return find(name) != nullptr; }

    /// Adds or replaces the array with the same name.
    DataArray& set(DataArray array)
    {
        for (auto& a : arrays_) {
            if (a.name == array.name) {
                a = std::move(array);
                return a;
            }
        }
        arrays_.push_back(std::move(array));
        return arrays_.back();
    }

    DataArray& set(std::string name, int components, std::vector<double> values,
                   ScalarType type = ScalarType::Float64)
    {
        return set(DataArray{std::move(name), components, type, std::move(values)});
    }

    const std::vector<DataArray>& arrays() const { return arrays_; }
    std::size_t size() const { return arrays_.size(); }
    bool empty() const { return arrays_.empty(); }

private:
    std::vector<DataArray> arrays_;
};

/// VTK-style cell array: `offsets[i]` is the end position of cell i in
/// `connectivity` (the start of cell 0 is implicitly 0).
struct CellArray
{
    std::vector<std::int64_t> connectivity;
    std::vector<std::int64_t> offsets;
    IndexType index_type = IndexType::Int64;

    std::size_t size() const { return offsets.size(); }
    bool empty() const { return offsets.empty(); }

    std::span<const std::int64_t> cell(std::size_t i) const
    {
        const auto begin = static_cast<std::size_t>(i == 0 ? 0 : offsets[i - 1]);
        const auto end = static_cast<std::size_t>(offsets[i]);
        return {connectivity.data() + begin, end - begin};
    }

    void push_back(std::span<const std::int64_t> ids)
    {
        connectivity.insert(connectivity.end(), ids.begin(), ids.end());
        offsets.push_back(static_cast<std::int64_t>(connectivity.size()));
    }

    void push_back(std::initializer_list<std::int64_t> ids)
    {
        push_back(std::span<const std::int64_t>(ids.begin(), ids.size()));
    }
};

namespace detail {

inline void validate_cells(const CellArray& cells, std::size_t point_count, const char* what)
{
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < cells.offsets.size(); ++i) {
        if (cells.offsets[i] <= prev) {
            fail(ErrorCode::CountMismatch,
                 std::string(what) + " offsets must be strictly increasing (cell " + std::to_string(i) + ")");
        }
        prev = cells.offsets[i];
    }
    if (static_cast<std::size_t>(prev) != cells.connectivity.size()) {
        fail(ErrorCode::CountMismatch, std::string(what) + " connectivity has " +
                                           std::to_string(cells.connectivity.size()) +
                                           " entries but offsets end at " + std::to_string(prev));
    }
    for (std::int64_t id : cells.connectivity) {
        if (id < 0 || static_cast<std::size_t>(id) >= point_count) {
            fail(ErrorCode::CountMismatch, std::string(what) + " connectivity index " + std::to_string(id) +
                                               " out of range for " + std::to_string(point_count) + " points");
        }
    }
}

inline void validate_fields(const FieldSet& fields, std::size_t expected, const char* association)
{
    for (const auto& a : fields.arrays()) {
        if (a.components != 1 && a.components != 3) {
            fail(ErrorCode::CountMismatch, "array '" + a.name + "' has " + std::to_string(a.components) +
                                               " components; only 1 or 3 are supported");
        }
        if (a.values.size() != expected * static_cast<std::size_t>(a.components)) {
            fail(ErrorCode::CountMismatch, std::string(association) + " array '" + a.name + "' has " +
                                               std::to_string(a.tuples()) + " tuples, expected " +
                                               std::to_string(expected));
        }
    }
}

} // namespace detail

/// Surface mesh (VTK PolyData subset: vertices and polygons).
struct PolySurface
{
    std::vector<Vec3> points;
    ScalarType point_type = ScalarType::Float64;
    CellArray verts;
    CellArray polys;
    FieldSet cell_fields;
    FieldSet point_fields;

    /// Cell data is ordered verts first, then polys (VTK convention).
    std::size_t cell_count() const { return verts.size() + polys.size(); }

    void validate() const
    {
        detail::validate_cells(verts, points.size(), "Verts");
        detail::validate_cells(polys, points.size(), "Polys");
        detail::validate_fields(cell_fields, cell_count(), "cell");
        detail::validate_fields(point_fields, points.size(), "point");
    }
};

enum class CellType : std::uint8_t
{
    Tetra = 10,
    Hexahedron = 12,
    Wedge = 13,
    Pyramid = 14,
    Polyhedron = 42,
};

inline bool is_supported_cell_type(std::uint8_t code)
{
    return code == 10 || code == 12 || code == 13 || code == 14 || code == 42;
}

/// Volume mesh (VTK UnstructuredGrid subset). Polyhedral face streams are
/// carried opaquely in `faces`/`face_offsets` and never interpreted.
struct UnstructuredGrid
{
    std::vector<Vec3> points;
    ScalarType point_type = ScalarType::Float64;
    CellArray cells;
    std::vector<std::uint8_t> types;
    std::vector<std::int64_t> faces;
    std::vector<std::int64_t> face_offsets;
    FieldSet cell_fields;
    FieldSet point_fields;

    std::size_t cell_count() const { return cells.size(); }

    void validate() const
    {
        detail::validate_cells(cells, points.size(), "Cells");
        if (types.size() != cells.size()) {
            fail(ErrorCode::CountMismatch, "types has " + std::to_string(types.size()) + " entries for " +
                                               std::to_string(cells.size()) + " cells");
        }
        for (std::size_t i = 0; i < types.size(); ++i) {
            if (!is_supported_cell_type(types[i])) {
                fail(ErrorCode::UnsupportedCellType,
                     "cell " + std::to_string(i) + " has type code " + std::to_string(types[i]));
            }
        }
        detail::validate_fields(cell_fields, cell_count(), "cell");
        detail::validate_fields(point_fields, points.size(), "point");
    }
};

/// Vertex-mean centers of every volume cell (polyhedra included).
inline std::vector<Vec3> cell_centers(const UnstructuredGrid& grid)
{
    std::vector<Vec3> centers(grid.cell_count());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        auto ids = grid.cells.cell(i);
        Vec3 c;
        for (auto id : ids) {
            c += grid.points[static_cast<std::size_t>(id)];
        }
        centers[i] = c / static_cast<double>(ids.size());
    }
    return centers;
}

struct TriangleSoup
{
    std::vector<std::array<Vec3, 3>> triangles;
    std::vector<Vec3> facet_normals;
    /// Indices of zero-area facets (kept in `triangles`, normal set to zero).
    std::vector<std::size_t> degenerate;

    std::size_t size() const { return triangles.size(); }
};

} // namespace aerobench
