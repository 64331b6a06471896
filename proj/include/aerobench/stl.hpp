#pragma once

#include <aerobench/core.hpp>
#include <aerobench/mesh.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace aerobench {

namespace stl_detail {

inline constexpr double kUnitTolerance = 1e-6;

inline bool looks_ascii(const std::string& bytes)
{
    std::size_t i = 0;
    while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) {
        ++i;
    }
    return bytes.compare(i, 5, "solid") == 0;
}

// Computes the facet normal from the vertices; flags zero-area facets.
inline void finish_facet(TriangleSoup& soup, const std::array<Vec3, 3>& tri, Vec3 stored)
{
    const Vec3 c = cross(tri[1] - tri[0], tri[2] - tri[0]);
    const double len = norm(c);
    const double scale = std::max({norm2(tri[1] - tri[0]), norm2(tri[2] - tri[1]), norm2(tri[0] - tri[2])});
    const bool degenerate = !(len > 1e-14 * scale) || scale == 0.0;
    const std::size_t index = soup.triangles.size();
    soup.triangles.push_back(tri);
    if (degenerate) {
        soup.degenerate.push_back(index);
        soup.facet_normals.push_back(std::abs(norm(stored) - 1.0) <= kUnitTolerance ? stored : Vec3{});
        return;
    }
    if (std::abs(norm(stored) - 1.0) > kUnitTolerance) {
        stored = c / len;
    }
    soup.facet_normals.push_back(stored);
}

class AsciiStlParser
{
public:
    explicit AsciiStlParser(const std::string& text) : in_(text) {}

    TriangleSoup parse()
    {
        TriangleSoup soup;
        expect("solid");
        std::string line;
        std::getline(in_, line);
        ++line_;
        for (;;) {
            std::string tok = next();
            if (tok == "endsolid") {
                break;
            }
            if (tok != "facet") {
                error("expected 'facet' or 'endsolid', got '" + tok + "'");
            }
            expect("normal");
            Vec3 n = vec();
            expect("outer");
            expect("loop");
            std::array<Vec3, 3> tri;
            for (auto& v : tri) {
                expect("vertex");
                v = vec();
            }
            expect("endloop");
            expect("endfacet");
            finish_facet(soup, tri, n);
        }
        return soup;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorCode::GrammarError, what + " (near token " + std::to_string(tokens_) + ")");
    }

    std::string next()
    {
        std::string tok;
        if (!(in_ >> tok)) {
            error("unexpected end of file");
        }
        ++tokens_;
        return tok;
    }

    void expect(const char* word)
    {
        std::string tok = next();
        if (tok != word) {
            error(std::string("expected '") + word + "', got '" + tok + "'");
        }
    }

    double number()
    {
        std::string tok = next();
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
            error("expected a number, got '" + tok + "'");
        }
        return v;
    }

    Vec3 vec()
    {
        Vec3 v;
        v.x = number();
        v.y = number();
        v.z = number();
        return v;
    }

    std::istringstream in_;
    std::size_t tokens_ = 0;
    std::size_t line_ = 0;
};

inline float read_f32(const char* p)
{
    float v;
    std::memcpy(&v, p, 4);
    return v;
}

} // namespace stl_detail

/// Reads ascii or binary STL. A file is binary when its size equals
/// 84 + 50 * (declared count); otherwise a leading "solid" selects ascii.
inline TriangleSoup read_stl(const std::string& path)
{
    using namespace stl_detail;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = std::move(ss).str();

    bool binary_size_matches = false;
    std::uint32_t declared = 0;
    if (bytes.size() >= 84) {
        std::memcpy(&declared, bytes.data() + 80, 4);
        binary_size_matches = bytes.size() == 84 + 50ull * declared;
    }

    TriangleSoup soup;
    if (!binary_size_matches && looks_ascii(bytes)) {
        soup = AsciiStlParser(bytes).parse();
    } else {
        if (bytes.size() < 84) {
            fail(ErrorCode::TruncatedFile, "binary STL shorter than its 84-byte header");
        }
        if (bytes.size() < 84 + 50ull * declared) {
            fail(ErrorCode::TruncatedFile, "binary STL declares " + std::to_string(declared) + " triangles but has " +
                                               std::to_string(bytes.size()) + " bytes");
        }
        soup.triangles.reserve(declared);
        for (std::uint32_t t = 0; t < declared; ++t) {
            const char* rec = bytes.data() + 84 + 50ull * t;
            Vec3 n{read_f32(rec), read_f32(rec + 4), read_f32(rec + 8)};
            std::array<Vec3, 3> tri;
            for (int v = 0; v < 3; ++v) {
                const char* p = rec + 12 + 12 * v;
                tri[v] = {read_f32(p), read_f32(p + 4), read_f32(p + 8)};
            }
            finish_facet(soup, tri, n);
        }
    }
    if (soup.triangles.empty()) {
        fail(ErrorCode::ZeroTriangles, "'" + path + "' contains no triangles");
    }
    return soup;
}

inline void write_stl(const TriangleSoup& soup, const std::string& path, bool binary = true)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    }
    if (binary) {
        char header[80] = {};
        std::snprintf(header, sizeof header, "aerobench binary STL");
        out.write(header, 80);
        const auto count = static_cast<std::uint32_t>(soup.triangles.size());
        out.write(reinterpret_cast<const char*>(&count), 4);
        for (std::size_t t = 0; t < soup.triangles.size(); ++t) {
            float rec[12];
            const Vec3 n = t < soup.facet_normals.size() ? soup.facet_normals[t] : Vec3{};
            rec[0] = static_cast<float>(n.x);
            rec[1] = static_cast<float>(n.y);
            rec[2] = static_cast<float>(n.z);
            for (int v = 0; v < 3; ++v) {
                rec[3 + 3 * v] = static_cast<float>(soup.triangles[t][v].x);
                rec[4 + 3 * v] = static_cast<float>(soup.triangles[t][v].y);
                rec[5 + 3 * v] = static_cast<float>(soup.triangles[t][v].z);
            }
            out.write(reinterpret_cast<const char*>(rec), sizeof rec);
            const std::uint16_t attr = 0;
            out.write(reinterpret_cast<const char*>(&attr), 2);
        }
    } else {
        char buf[128];
        out << "solid aerobench\n";
        for (std::size_t t = 0; t < soup.triangles.size(); ++t) {
            const Vec3 n = t < soup.facet_normals.size() ? soup.facet_normals[t] : Vec3{};
            std::snprintf(buf, sizeof buf, "  facet normal %.17g %.17g %.17g\n", n.x, n.y, n.z);
            out << buf << "    outer loop\n";
            for (const auto& v : soup.triangles[t]) {
                std::snprintf(buf, sizeof buf, "      vertex %.17g %.17g %.17g\n", v.x, v.y, v.z);
                out << buf;
            }
            out << "    endloop\n  endfacet\n";
        }
        out << "endsolid aerobench\n";
    }
    if (!out) {
        fail(ErrorCode::IoError, "failed writing '" + path + "'");
    }
}

/// Builds a soup from triangles, computing facet normals from the winding.
inline TriangleSoup make_triangle_soup(const std::vector<std::array<Vec3, 3>>& triangles)
{
    TriangleSoup soup;
    for (const auto& t : triangles) {
        stl_detail::finish_facet(soup, t, Vec3{});
    }
    return soup;
}

} // namespace aerobench
