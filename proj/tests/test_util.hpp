#pragma once

#include <aerobench/core.hpp>
#include <aerobench/random.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir()
{
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    auto dir = std::filesystem::temp_directory_path() / "aerobench_tests" /
               (std::string(info->test_suite_name()) + "." + info->name());
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<aerobench::Vec3> random_points(std::size_t n, std::uint64_t seed, double scale = 1.0)
{
    aerobench::Rng rng(seed);
    std::vector<aerobench::Vec3> pts(n);
    for (auto& p : pts) {
        p = {scale * aerobench::uniform01(rng), scale * aerobench::uniform01(rng), scale * aerobench::uniform01(rng)};
    }
    return pts;
}

#define EXPECT_AEROBENCH_ERROR(stmt, expected_code)                                                            \
    do {                                                                                                       \
        try {                                                                                                  \
            stmt;                                                                                              \
            ADD_FAILURE() << "expected " << aerobench::to_string(expected_code) << ", nothing thrown";          \
        } catch (const aerobench::Error& e) {                                                                  \
            EXPECT_EQ(e.code(), expected_code) << e.what();                                                    \
        }                                                                                                      \
    } while (0)

} // namespace testutil
