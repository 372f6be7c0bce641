#ifndef DSM_GALLERY_HPP
#define DSM_GALLERY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsm/operator_model.hpp"

namespace dsm {

/// Deterministic desk-scale problem gallery.
/// Ids: identity, cubic-monotone, hoelder, hilbert-linear, rank-deficient,
/// normal-equations. Throws GalleryError for unknown ids.
OperatorProblem make_gallery(const std::string& name, int n, std::uint64_t seed = 0);

const std::vector<std::string>& gallery_ids();

/// Machine-readable manifest: name, reference size/seed, constants, solution flag.
std::string gallery_manifest_json();

}  // namespace dsm

#endif
