#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skybright {

/// Error type thrown by all skybright operations. Messages carry
/// "file:line:" context when the error originates from an input file.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// WGS84 geographic coordinate, degrees. lon in [-180,180], lat in [-90,90].
struct GeoPoint {
  double lon{0.0};
  double lat{0.0};
};

/// Planar coordinate in km relative to a projection origin.
struct PlanarPoint {
  double x{0.0};
  double y{0.0};
};

/// Azimuthal-equidistant projection centered on `origin`.
struct ProjectionSpec {
  GeoPoint origin;
};

/// One citizen-science sky-brightness report on the 0-7 naked-eye scale
/// (0 = only the reference star visible, 7 = fully dark sky).
struct Observation {
  GeoPoint location;
  int brightness{0};
  std::string date;  // optional ISO-8601 date, unused by the models
};

/// Collects non-fatal diagnostics. Readers and pipeline stages append here
/// instead of failing; callers report the summary at the end of a run.
class WarningLog {
public:
  void add(std::string message) { messages_.push_back(std::move(message)); }
  std::size_t count() const { return messages_.size(); }
  const std::vector<std::string>& messages() const { return messages_; }
  bool empty() const { return messages_.empty(); }

private:
  std::vector<std::string> messages_;
};

}  // namespace skybright
