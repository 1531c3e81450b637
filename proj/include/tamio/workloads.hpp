#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tamio/extent.hpp"

namespace tamio {

enum class WorkloadKind { Contiguous1D, BTIO, S3D, DecompFile };

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::Contiguous1D;
    std::uint64_t block_bytes = 65536;  // contiguous1d
    std::uint64_t n = 0;                // grid edge (btio, s3d)
    int vars = 40;                      // btio variable count
    int px = 0, py = 0, pz = 0;         // s3d process grid (0 = factor automatically)
    std::string path;                   // decomposition file
};

// Rank p writes the single extent (p * block_bytes, block_bytes). The
// calibration workload: trivially coalescable, spans stripes on demand.
std::vector<ProcRequest> gen_contiguous1d(int p, std::uint64_t block_bytes);

// Block-tridiagonal partitioning over an n^3 grid of 5-double cells, `vars`
// arrays back to back, x fastest. P must be a square s^2 with s dividing n;
// process (r, c) (rank r + c*s) owns, per z-slab t, the cell block
// ((r + t) mod s, c, t), contributing (n/s)^2 rows of (n/s)*40 bytes each.
// Adjacent ranks own x-adjacent blocks, which is what makes the requests
// coalescable after the intra-node gather.
std::vector<ProcRequest> gen_btio(std::uint64_t n, int p, int vars = 40);

// Checkpoint of mass(11), velocity(3), pressure(1) and temperature(1) over
// an n^3 grid, fourth dimension slowest, x fastest, the first three
// dimensions partitioned block-block-block on a px*py*pz process grid
// (rank = ix + iy*px + iz*px*py).
std::vector<ProcRequest> gen_s3d(std::uint64_t n, int px, int py, int pz);

// Loads a recorded decomposition (JSON: {element_size, total_elements,
// procs: [{rank, offsets[], lengths[]}]}, element units) and deals the
// recorded processes round-robin onto p_target ranks, whole processes at a
// time. Requires p_target <= recorded process count.
std::vector<ProcRequest> load_decomp(const std::string& path, int p_target);

std::vector<ProcRequest> generate(const WorkloadSpec& spec, int p);

const char* to_string(WorkloadKind kind);
WorkloadKind workload_kind_from(const std::string& name);

// Closed-form totals, evaluable without generating.
std::uint64_t btio_total_bytes(std::uint64_t n, int vars = 40);
std::uint64_t btio_total_extents(std::uint64_t n, int p, int vars = 40);
std::uint64_t s3d_total_bytes(std::uint64_t n);

}  // namespace tamio
