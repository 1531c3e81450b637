#include "tamio/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "tamio/error.hpp"

namespace tamio {

std::vector<ProcRequest> gen_contiguous1d(int p, std::uint64_t block_bytes) {
    if (p < 1) throw config_error("gen_contiguous1d: P must be >= 1");
    if (block_bytes == 0) throw config_error("gen_contiguous1d: block_bytes must be > 0");
    std::vector<ProcRequest> procs;
    procs.reserve(p);
    for (int rank = 0; rank < p; ++rank) {
        ProcRequest proc{rank, RequestList::from_extents({{rank * block_bytes, block_bytes}}),
                         static_cast<std::uint64_t>(rank)};
        procs.push_back(std::move(proc));
    }
    return procs;
}

namespace {

int exact_isqrt(int p) {
    const int s = static_cast<int>(std::lround(std::sqrt(double(p))));
    return s * s == p ? s : -1;
}

}  // namespace

std::vector<ProcRequest> gen_btio(std::uint64_t n, int p, int vars) {
    const int s = exact_isqrt(p);
    if (s <= 0) throw config_error("gen_btio: P must be a perfect square");
    if (n == 0 || n % static_cast<std::uint64_t>(s) != 0)
        throw config_error("gen_btio: sqrt(P) must divide n");
    if (vars < 1) throw config_error("gen_btio: vars must be >= 1");

    const std::uint64_t b = n / s;            // cells per block edge
    const std::uint64_t cell = 5 * 8;         // five doubles per grid cell
    const std::uint64_t row_bytes = b * cell; // one x-run of a block
    const std::uint64_t var_bytes = n * n * n * cell;

    std::vector<ProcRequest> procs;
    procs.reserve(p);
    for (int rank = 0; rank < p; ++rank) {
        const int r = rank % s;
        const int col = rank / s;
        std::vector<OffsetLength> extents;
        extents.reserve(std::size_t(vars) * s * b * b);
        for (int v = 0; v < vars; ++v) {
            for (int t = 0; t < s; ++t) {  // z-slab; the diagonal shift picks the x block
                const std::uint64_t i0 = std::uint64_t((r + t) % s) * b;
                const std::uint64_t j0 = std::uint64_t(col) * b;
                const std::uint64_t k0 = std::uint64_t(t) * b;
                for (std::uint64_t kl = 0; kl < b; ++kl) {
                    for (std::uint64_t jl = 0; jl < b; ++jl) {
                        const std::uint64_t k = k0 + kl;
                        const std::uint64_t j = j0 + jl;
                        extents.push_back(
                            {std::uint64_t(v) * var_bytes + ((k * n + j) * n + i0) * cell,
                             row_bytes});
                    }
                }
            }
        }
        procs.push_back({rank, RequestList::from_extents(std::move(extents)),
                         static_cast<std::uint64_t>(rank)});
    }
    return procs;
}

std::vector<ProcRequest> gen_s3d(std::uint64_t n, int px, int py, int pz) {
    if (px < 1 || py < 1 || pz < 1) throw config_error("gen_s3d: process grid factors must be >= 1");
    if (n == 0 || n % std::uint64_t(px) || n % std::uint64_t(py) || n % std::uint64_t(pz))
        throw config_error("gen_s3d: px, py, pz must divide n");

    const int p = px * py * pz;
    const std::uint64_t bx = n / px, by = n / py, bz = n / pz;
    const std::uint64_t elem = 8;
    static constexpr int kDim4[] = {11, 3, 1, 1};  // mass, velocity, pressure, temperature

    std::vector<ProcRequest> procs;
    procs.reserve(p);
    for (int rank = 0; rank < p; ++rank) {
        const std::uint64_t ix = rank % px;
        const std::uint64_t iy = (rank / px) % py;
        const std::uint64_t iz = rank / (px * py);
        std::vector<OffsetLength> extents;
        std::uint64_t base = 0;
        for (int d4 : kDim4) {
            for (int w = 0; w < d4; ++w) {
                for (std::uint64_t zl = 0; zl < bz; ++zl) {
                    for (std::uint64_t yl = 0; yl < by; ++yl) {
                        const std::uint64_t z = iz * bz + zl;
                        const std::uint64_t y = iy * by + yl;
                        const std::uint64_t x0 = ix * bx;
                        extents.push_back(
                            {base + (((std::uint64_t(w) * n + z) * n + y) * n + x0) * elem,
                             bx * elem});
                    }
                }
            }
            base += std::uint64_t(d4) * n * n * n * elem;
        }
        procs.push_back({rank, RequestList::from_extents(std::move(extents)),
                         static_cast<std::uint64_t>(rank)});
    }
    return procs;
}

std::vector<ProcRequest> load_decomp(const std::string& path, int p_target) {
    if (p_target < 1) throw config_error("load_decomp: P must be >= 1");
    std::ifstream in(path);
    if (!in) throw config_error("load_decomp: cannot open " + path);

    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("load_decomp: malformed JSON in " + path + ": " + e.what());
    }
    if (!doc.contains("element_size") || !doc.contains("procs"))
        throw config_error("load_decomp: missing element_size or procs in " + path);
    const std::uint64_t elem = doc["element_size"].get<std::uint64_t>();
    if (elem == 0) throw config_error("load_decomp: element_size must be > 0");

    struct Recorded {
        int rank;
        std::vector<std::uint64_t> offsets, lengths;
    };
    std::vector<Recorded> recorded;
    for (const auto& entry : doc["procs"]) {
        Recorded r;
        r.rank = entry.at("rank").get<int>();
        r.offsets = entry.at("offsets").get<std::vector<std::uint64_t>>();
        r.lengths = entry.at("lengths").get<std::vector<std::uint64_t>>();
        if (r.offsets.size() != r.lengths.size())
            throw config_error("load_decomp: offsets/lengths size mismatch for recorded rank " +
                               std::to_string(r.rank));
        recorded.push_back(std::move(r));
    }
    if (static_cast<int>(recorded.size()) < p_target)
        throw config_error("load_decomp: P exceeds recorded process count " +
                           std::to_string(recorded.size()));
    std::sort(recorded.begin(), recorded.end(),
              [](const Recorded& a, const Recorded& b) { return a.rank < b.rank; });

    // Deal recorded processes round-robin onto the targets, whole processes
    // at a time, then re-sort each target's combined list by offset.
    std::vector<ProcRequest> procs(p_target);
    for (int target = 0; target < p_target; ++target) {
        std::vector<OffsetLength> extents;
        for (std::size_t i = target; i < recorded.size(); i += p_target) {
            const auto& r = recorded[i];
            for (std::size_t j = 0; j < r.offsets.size(); ++j)
                extents.push_back({r.offsets[j] * elem, r.lengths[j] * elem});
        }
        std::sort(extents.begin(), extents.end(),
                  [](const OffsetLength& a, const OffsetLength& b) { return a.offset < b.offset; });
        procs[target] = {target, RequestList::from_extents(std::move(extents)),
                         static_cast<std::uint64_t>(target)};
        if (auto v = validate_proc(procs[target], p_target))
            throw config_error("load_decomp: recorded data invalid for target rank " +
                               std::to_string(target) + ": " + v->reason);
    }
    return procs;
}

std::vector<ProcRequest> generate(const WorkloadSpec& spec, int p) {
    switch (spec.kind) {
        case WorkloadKind::Contiguous1D:
            return gen_contiguous1d(p, spec.block_bytes);
        case WorkloadKind::BTIO:
            return gen_btio(spec.n, p, spec.vars);
        case WorkloadKind::S3D: {
            int px = spec.px, py = spec.py, pz = spec.pz;
            if (px == 0 && py == 0 && pz == 0) {
                // Most-cubic factorization with px >= py >= pz.
                px = p;
                py = pz = 1;
                for (int a = 1; a * a * a <= p; ++a) {
                    if (p % a) continue;
                    for (int b = a; std::uint64_t(b) * b <= std::uint64_t(p) / a; ++b) {
                        if ((p / a) % b) continue;
                        px = p / a / b;
                        py = b;
                        pz = a;
                    }
                }
            }
            if (px * py * pz != p)
                throw config_error("gen_s3d: px*py*pz must equal P");
            return gen_s3d(spec.n, px, py, pz);
        }
        case WorkloadKind::DecompFile:
            return load_decomp(spec.path, p);
    }
    throw config_error("generate: unknown workload kind");
}

const char* to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::Contiguous1D: return "contiguous1d";
        case WorkloadKind::BTIO: return "btio";
        case WorkloadKind::S3D: return "s3d";
        case WorkloadKind::DecompFile: return "decomp_file";
    }
    return "?";
}

WorkloadKind workload_kind_from(const std::string& name) {
    if (name == "contiguous1d") return WorkloadKind::Contiguous1D;
    if (name == "btio") return WorkloadKind::BTIO;
    if (name == "s3d") return WorkloadKind::S3D;
    if (name == "decomp_file") return WorkloadKind::DecompFile;
    throw config_error("unknown workload: " + name);
}

std::uint64_t btio_total_bytes(std::uint64_t n, int vars) {
    return 8 * std::uint64_t(vars) * n * n * n * 5;
}

std::uint64_t btio_total_extents(std::uint64_t n, int p, int vars) {
    const int s = exact_isqrt(p);
    if (s <= 0) throw config_error("btio_total_extents: P must be a perfect square");
    return std::uint64_t(vars) * n * n * std::uint64_t(s);
}

std::uint64_t s3d_total_bytes(std::uint64_t n) { return 8 * 16 * n * n * n; }

}  // namespace tamio
