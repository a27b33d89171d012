#include "gtrans/error.hpp"

namespace gtrans {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::origin_not_interior: return "origin-not-interior";
    case ErrorKind::not_convex: return "not-convex";
    case ErrorKind::degenerate_curvature: return "degenerate-curvature";
    case ErrorKind::chart_out_of_range: return "chart-out-of-range";
    case ErrorKind::nonintegrable_singularity: return "nonintegrable-singularity";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::not_radial: return "not-radial";
    case ErrorKind::rejection_stall: return "rejection-stall";
    case ErrorKind::convexity_loss: return "convexity-loss";
    case ErrorKind::domain_escape: return "domain-escape";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::ambiguous_normal: return "ambiguous-normal";
    case ErrorKind::out_of_annulus: return "out-of-annulus";
    case ErrorKind::size_limit: return "size-limit";
    case ErrorKind::empty_level: return "empty-level";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::wrong_target_density: return "wrong-target-density";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace gtrans
