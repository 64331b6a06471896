#pragma once

#include <aerobench/core.hpp>
#include <aerobench/mesh.hpp>

#include <map>
#include <string>
#include <vector>

namespace aerobench {

enum class Association
{
    Cell,
    Point,
};

/// Ground truth and prediction of one physical quantity, stored in the same
/// file under two different array names.
struct FieldPair
{
    std::string name;
    std::vector<double> true_values;
    std::vector<double> pred_values;
    int components = 1;
    Association association = Association::Cell;

    std::size_t tuples() const { return true_values.size() / static_cast<std::size_t>(components); }
    double truth(std::size_t i, int c = 0) const { return true_values[i * components + c]; }
    double pred(std::size_t i, int c = 0) const { return pred_values[i * components + c]; }
};

struct FieldNames
{
    std::string true_name;
    std::string pred_name;
};

/// quantity → (true array name, predicted array name); ordered by quantity.
using FieldMapping = std::map<std::string, FieldNames>;

namespace fields_detail {

inline const DataArray* lookup(const FieldSet& cells, const FieldSet& points, const std::string& name,
                               Association& assoc)
{
    if (const auto* a = cells.find(name)) {
        assoc = Association::Cell;
        return a;
    }
    if (const auto* a = points.find(name)) {
        assoc = Association::Point;
        return a;
    }
    return nullptr;
}

inline std::vector<FieldPair> pair_fields(const FieldSet& cells, const FieldSet& points, const FieldMapping& mapping)
{
    std::vector<FieldPair> pairs;
    for (const auto& [quantity, names] : mapping) {
        Association ta{}, pa{};
        const DataArray* t = lookup(cells, points, names.true_name, ta);
        if (!t) {
            fail(ErrorCode::MissingField, names.true_name);
        }
        const DataArray* p = lookup(cells, points, names.pred_name, pa);
        if (!p) {
            fail(ErrorCode::MissingField, names.pred_name);
        }
        if (ta != pa || t->components != p->components || t->values.size() != p->values.size()) {
            fail(ErrorCode::LengthMismatch, "arrays '" + names.true_name + "' and '" + names.pred_name +
                                                "' differ in association, length or components");
        }
        pairs.push_back(FieldPair{quantity, t->values, p->values, t->components, ta});
    }
    return pairs;
}

} // namespace fields_detail

inline std::vector<FieldPair> pair_fields(const PolySurface& s, const FieldMapping& mapping)
{
    return fields_detail::pair_fields(s.cell_fields, s.point_fields, mapping);
}

inline std::vector<FieldPair> pair_fields(const UnstructuredGrid& g, const FieldMapping& mapping)
{
    return fields_detail::pair_fields(g.cell_fields, g.point_fields, mapping);
}

inline const FieldPair& find_pair(const std::vector<FieldPair>& pairs, const std::string& quantity)
{
    for (const auto& p : pairs) {
        if (p.name == quantity) {
            return p;
        }
    }
    fail(ErrorCode::MissingField, quantity);
}

/// Averages a point-associated field onto polygons (vertex mean).
inline std::vector<double> point_to_cell(const CellArray& cells, const std::vector<double>& values, int components)
{
    std::vector<double> out(cells.size() * components, 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto ids = cells.cell(i);
        for (auto id : ids) {
            for (int c = 0; c < components; ++c) {
                out[i * components + c] += values[static_cast<std::size_t>(id) * components + c];
            }
        }
        for (int c = 0; c < components; ++c) {
            out[i * components + c] /= static_cast<double>(ids.size());
        }
    }
    return out;
}

} // namespace aerobench
