// aerobench command-line front end. One verb per workflow; see README.md.
//
// Exit codes: 0 every sample succeeded, 1 some samples failed (their errors
// are in the report), 2 fatal error (bad arguments, config, or no sample
// succeeded).

#include <aerobench/bench.hpp>
#include <aerobench/config.hpp>
#include <aerobench/report.hpp>
#include <aerobench/sampling.hpp>
#include <aerobench/split.hpp>
#include <aerobench/stl.hpp>
#include <aerobench/vtk_xml.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace aerobench;

namespace {

struct CommonOptions
{
    std::string config;
    std::string samples;
    std::string out;
    unsigned jobs = 0;
    std::string formats;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool require_config = true)
{
    auto* c = cmd->add_option("--config", o.config, "benchmark configuration (JSON)");
    if (require_config) {
        c->required()->check(CLI::ExistingFile);
    }
    cmd->add_option("--samples", o.samples, "sample-id file or comma-separated ids (overrides the config)");
    cmd->add_option("--out", o.out, "output directory (default: config output.dir)");
    cmd->add_option("--jobs", o.jobs, "worker threads (default: config jobs, else 1)");
    cmd->add_option("--format", o.formats, "comma-separated subset of json,csv,svg");
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        auto tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) {
            out.push_back(tok);
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

/// Loads the config and folds the command-line overrides into it.
BenchConfig effective_config(const CommonOptions& o)
{
    BenchConfig cfg = load_config(o.config);
    if (o.jobs > 0) {
        cfg.jobs = o.jobs;
    }
    if (!o.formats.empty()) {
        cfg.formats = split_list(o.formats);
    }
    if (!o.out.empty()) {
        // Command-line paths are relative to the working directory.
        cfg.out_dir = fs::absolute(o.out).string();
    }
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_section(const ReportSection& s, double secs)
{
    std::printf("%s: %zu samples ok, %zu failed (%.2f s)\n", s.kind.c_str(), s.records.size(), s.errors.size(), secs);
    for (const auto& e : s.errors) {
        std::fprintf(stderr, "  %s: %s\n", e.id.c_str(), e.message.c_str());
    }
    if (s.forces) {
        auto show = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string("n/a"); };
        std::printf("  drag: R2 %s, spearman %s, mean |err| %.6g\n", show(s.forces->r2_drag).c_str(),
                    show(s.forces->spearman_drag).c_str(), s.forces->mean_abs_err_drag);
    }
}

using SectionRunner = ReportSection (*)(const BenchConfig&, const std::vector<std::string>&);

/// Runs the given workflows and writes one report named after `name`.
int run_report(const CommonOptions& o, const std::string& name, const std::vector<SectionRunner>& runners,
               const std::function<void(BenchConfig&)>& adjust = {})
{
    BenchConfig cfg = effective_config(o);
    if (adjust) {
        adjust(cfg);
    }
    const auto ids = resolve_samples(cfg, o.samples);
    BenchmarkReport report;
    report.config_digest = config_digest(cfg);
    for (auto runner : runners) {
        const auto t0 = std::chrono::steady_clock::now();
        ReportSection s = runner(cfg, ids);
        print_section(s, seconds_since(t0));
        auto& slot = s.kind == "surface" ? report.surface : s.kind == "volume" ? report.volume : report.pointcloud;
        slot = std::move(s);
    }
    const fs::path out = cfg.resolve(cfg.out_dir);
    emit_report(report, cfg.formats, out, name + "_report.json");
    std::printf("wrote %s\n", out.string().c_str());
    return report.has_errors() ? 1 : 0;
}

int run_split(const std::string& config, std::string drag_csv, std::optional<double> val_frac,
              std::optional<double> tail_frac, std::optional<std::uint64_t> seed, std::string out,
              const std::string& formats)
{
    SplitConfig sc;
    std::string cfg_out;
    if (!config.empty()) {
        const BenchConfig cfg = load_config(config);
        sc = cfg.split;
        if (!sc.drag_csv.empty()) {
            sc.drag_csv = cfg.resolve(sc.drag_csv).string();
        }
        cfg_out = cfg.resolve(cfg.out_dir).string();
    }
    if (!drag_csv.empty()) sc.drag_csv = drag_csv;
    if (val_frac) sc.val_frac = *val_frac;
    if (tail_frac) sc.tail_frac = *tail_frac;
    if (seed) sc.seed = *seed;
    if (sc.drag_csv.empty()) {
        fail(ErrorCode::InvalidArgument, "split needs --drag-csv or split.drag_csv in the config");
    }
    if (out.empty()) {
        out = cfg_out.empty() ? "split_out" : cfg_out;
    }
    const auto records = read_drag_csv(sc.drag_csv);
    const SplitSpec split = compute_split(records, sc.val_frac, sc.tail_frac, sc.seed);
    fs::create_directories(out);
    write_id_list(split.train_ids, (fs::path(out) / "train_ids.txt").string());
    write_id_list(split.val_ids, (fs::path(out) / "val_ids.txt").string());
    auto ids = [](const IdSet& s) { return std::vector<std::string>(s.begin(), s.end()); };
    const nlohmann::json j{{"schema_version", kSchemaVersion},
                           {"seed", split.seed},
                           {"val_frac", split.val_frac},
                           {"tail_frac", split.tail_frac},
                           {"train_count", split.train_ids.size()},
                           {"val_count", split.val_ids.size()},
                           {"top_tail", ids(split.top_tail)},
                           {"bottom_tail", ids(split.bottom_tail)},
                           {"random", ids(split.random_ids)},
                           {"val_ids", ids(split.val_ids)}};
    emit_detail::write_text(fs::path(out) / "split.json", j.dump(2) + "\n");
    if (formats.empty() || formats.find("svg") != std::string::npos) {
        split_plot(records, split).save((fs::path(out) / "split.svg").string());
    }
    std::printf("split: %zu train, %zu validation (%zu + %zu tails, %zu random) -> %s\n", split.train_ids.size(),
                split.val_ids.size(), split.bottom_tail.size(), split.top_tail.size(), split.random_ids.size(),
                out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"aerobench: evaluate predicted aerodynamic fields against CFD ground truth"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonOptions surface_opts, volume_opts, pc_opts, residual_opts, extract_opts, sample_opts;
    auto* surface = app.add_subcommand("bench-surface", "surface L2, area-weighted L2, forces, trends, centerlines");
    add_common(surface, surface_opts);
    auto* volume = app.add_subcommand("bench-volume", "volume L2 per component, probes, slices");
    add_common(volume, volume_opts);
    auto* pointcloud = app.add_subcommand("validate-pointcloud", "point-cloud vs mesh force validation");
    add_common(pointcloud, pc_opts);

    auto* residuals = app.add_subcommand("residuals", "continuity and momentum residuals of volume fields");
    add_common(residuals, residual_opts);
    bool write_vtu = false;
    std::optional<double> nu;
    std::optional<std::size_t> k;
    residuals->add_flag("--write-vtu", write_vtu, "write residual fields to <out>/residuals/<id>.vtu");
    residuals->add_option("--nu", nu, "kinematic viscosity (m^2/s)");
    residuals->add_option("--k", k, "gradient stencil size");

    auto* extract = app.add_subcommand("extract", "centerlines, probe lines and slices only");
    add_common(extract, extract_opts);

    auto* split = app.add_subcommand("split", "drag-stratified train/validation split");
    std::string split_config, drag_csv, split_out, split_formats;
    std::optional<double> val_frac, tail_frac;
    std::optional<std::uint64_t> split_seed;
    split->add_option("--config", split_config, "configuration with a split section")->check(CLI::ExistingFile);
    split->add_option("--drag-csv", drag_csv, "CSV of id,drag")->check(CLI::ExistingFile);
    split->add_option("--val-frac", val_frac, "validation fraction (default 0.1)");
    split->add_option("--tail-frac", tail_frac, "fraction of the validation set per drag tail (default 0.1)");
    split->add_option("--seed", split_seed, "seed for the random middle draw (default 0)");
    split->add_option("--out", split_out, "output directory");
    split->add_option("--format", split_formats, "json,svg");

    auto* sample = app.add_subcommand("sample-stl", "uniform surface point cloud from STL");
    add_common(sample, sample_opts, false);
    std::string stl, cloud_out;
    std::optional<std::size_t> n_points;
    std::optional<std::uint64_t> sample_seed;
    sample->add_option("--stl", stl, "single STL file (instead of --config)")->check(CLI::ExistingFile);
    sample->add_option("--n", n_points, "number of points");
    sample->add_option("--seed", sample_seed, "sampler seed");
    sample->add_option("--cloud", cloud_out, "output .vtp for --stl mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*surface) {
            return run_report(surface_opts, "surface", {&run_surface_benchmark});
        }
        if (*volume) {
            return run_report(volume_opts, "volume", {&run_volume_benchmark});
        }
        if (*pointcloud) {
            return run_report(pc_opts, "pointcloud", {&run_pointcloud_validation});
        }
        if (*residuals) {
            return run_report(residual_opts, "residuals", {&run_volume_benchmark}, [&](BenchConfig& c) {
                c.volume.residuals = true;
                c.volume.write_residual_vtu = c.volume.write_residual_vtu || write_vtu;
                if (nu) c.volume.nu = *nu;
                if (k) c.volume.residual_k = *k;
            });
        }
        if (*extract) {
            return run_report(extract_opts, "extract", {&run_surface_benchmark, &run_volume_benchmark},
                              [](BenchConfig& c) {
                                  if (!c.flow.u_ref) {
                                      fail(ErrorCode::InvalidConfig, "extract needs flow.u_ref for Cp centerlines");
                                  }
                                  c.surface.centerlines = true;
                                  c.formats.erase(std::remove(c.formats.begin(), c.formats.end(), "json"),
                                                  c.formats.end());
                              });
        }
        if (*split) {
            return run_split(split_config, drag_csv, val_frac, tail_frac, split_seed, split_out, split_formats);
        }
        if (*sample) {
            if (!stl.empty()) {
                if (cloud_out.empty()) {
                    fail(ErrorCode::InvalidArgument, "--stl mode needs --cloud <file.vtp>");
                }
                const auto soup = read_stl(stl);
                const auto cloud = sample_surface_uniform(soup, n_points.value_or(100000), sample_seed.value_or(0));
                write_vtp(cloud_to_polydata(cloud), cloud_out);
                std::printf("sampled %zu points (area per point %.9g, %zu degenerate facets) -> %s\n", cloud.size(),
                            cloud.area_per_point, cloud.degenerate_facets, cloud_out.c_str());
                return 0;
            }
            if (sample_opts.config.empty()) {
                fail(ErrorCode::InvalidArgument, "sample-stl needs --config or --stl");
            }
            BenchConfig cfg = effective_config(sample_opts);
            if (n_points) cfg.pointcloud.n_points = *n_points;
            if (sample_seed) cfg.pointcloud.seed = *sample_seed;
            const auto ids = resolve_samples(cfg, sample_opts.samples);
            const fs::path out = cfg.resolve(cfg.out_dir) / "clouds";
            emit_sample_clouds(cfg, ids, out);
            std::printf("wrote %zu clouds of %zu points -> %s\n", ids.size(), cfg.pointcloud.n_points,
                        out.string().c_str());
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
