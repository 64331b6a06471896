#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aerobench {

/// Error categories surfaced by the toolkit. Each thrown `Error` carries
/// exactly one of these so callers (and tests) can branch on the kind
/// without parsing messages.
enum class ErrorCode
{
    MalformedXml,
    UnsupportedEncoding,
    CountMismatch,
    UnsupportedCellType,
    TruncatedFile,
    GrammarError,
    ZeroTriangles,
    IoError,
    MissingField,
    DegenerateCell,
    EmptyPointSet,
    ZeroNorm,
    LengthMismatch,
    NonUnitNormal,
    ConstantTruth,
    ConstantRanks,
    RankDeficientStencil,
    AllMasked,
    EmptyBand,
    TooFewSamples,
    NonFiniteDrag,
    PointCountMismatch,
    NoSamples,
    ParseError,
    InvalidArgument,
    InvalidConfig,
};

inline constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::UnsupportedCellType: return "UnsupportedCellType";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::GrammarError: return "GrammarError";
    case ErrorCode::ZeroTriangles: return "ZeroTriangles";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonUnitNormal: return "NonUnitNormal";
    case ErrorCode::ConstantTruth: return "ConstantTruth";
    case ErrorCode::ConstantRanks: return "ConstantRanks";
    case ErrorCode::RankDeficientStencil: return "RankDeficientStencil";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonFiniteDrag: return "NonFiniteDrag";
    case ErrorCode::PointCountMismatch: return "PointCountMismatch";
    case ErrorCode::NoSamples: return "NoSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o)
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s)
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline Vec3 normalized(const Vec3& a)
{
    const double n = norm(a);
    return n > 0.0 ? a / n : Vec3{};
}

inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline constexpr double distance2(const Vec3& a, const Vec3& b) { return norm2(a - b); }

inline constexpr std::string_view kToolVersion = "1.0.0";

} // namespace aerobench
