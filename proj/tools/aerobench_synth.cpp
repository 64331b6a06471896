// Writes a synthetic car-box dataset (surface, volume, STL and predicted
// point cloud per sample) plus a matching config.json and drag.csv, so that
// every aerobench verb can be exercised without CFD data.

#include <aerobench/geometry.hpp>
#include <aerobench/metrics.hpp>
#include <aerobench/synthetic.hpp>
#include <aerobench/vtk_xml.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace aerobench;

int main(int argc, char** argv)
{
    CLI::App app{"aerobench-synth: generate a synthetic benchmark dataset"};
    std::string out = "synthetic_data";
    synthetic::DatasetOptions opt;
    bool no_volume = false;
    bool no_cloud = false;
    app.add_option("--out", out, "dataset directory");
    app.add_option("--samples", opt.samples, "number of samples");
    app.add_option("--spacing", opt.spacing, "surface quad edge length (m)");
    app.add_option("--cloud-points", opt.cloud_points, "points per predicted cloud");
    app.add_option("--seed", opt.seed, "geometry/perturbation seed");
    app.add_flag("--no-volume", no_volume, "skip volume.vtu");
    app.add_flag("--no-pointcloud", no_cloud, "skip body.stl and cloud_pred.vtp");
    CLI11_PARSE(app, argc, argv);
    opt.volume = !no_volume;
    opt.pointcloud = !no_cloud;

    try {
        const auto ids = synthetic::write_dataset(out, opt);
        auto cfg = synthetic::dataset_config(ids, opt);
        cfg["split"] = {{"drag_csv", "drag.csv"}};
        std::ofstream(fs::path(out) / "config.json") << cfg.dump(2) << "\n";

        // True drag per sample, for the split verb.
        std::ofstream csv(fs::path(out) / "drag.csv");
        csv << "id,drag\n";
        FlowConditions fc;
        for (const auto& id : ids) {
            const auto s = read_vtp((fs::path(out) / id / "boundary.vtp").string());
            const auto g = cell_geometry(s);
            const auto& p = s.cell_fields.find("pMeanTrim")->values;
            const auto& t = s.cell_fields.find("wallShearStressMeanTrim")->values;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", integrate_surface_forces(p, t, g.areas, g.normals, fc).drag);
            csv << id << "," << buf << "\n";
        }
        std::printf("wrote %zu samples to %s\n", ids.size(), out.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
