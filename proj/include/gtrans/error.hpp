#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gtrans {

enum class ErrorKind {
  invalid_argument,
  origin_not_interior,
  not_convex,
  degenerate_curvature,
  chart_out_of_range,
  nonintegrable_singularity,
  out_of_domain,
  not_radial,
  rejection_stall,
  convexity_loss,
  domain_escape,
  out_of_range,
  ambiguous_normal,
  out_of_annulus,
  size_limit,
  empty_level,
  geometry,
  wrong_target_density,
  config,
  io,
};

/// Stable kebab-case identifier used in JSON logs and reports.
std::string_view kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace gtrans
