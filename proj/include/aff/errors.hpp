#pragma once

#include <stdexcept>
#include <string>

namespace aff {

// Error taxonomy for the pipeline. Each condition gets its own type so
// callers (and the CLI exit-code table) can distinguish them.
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define AFF_DEFINE_ERROR(Name)                    \
  struct Name : PipelineError {                   \
    explicit Name(const std::string& msg = #Name) \
        : PipelineError(msg) {}                   \
  }

AFF_DEFINE_ERROR(AllPixelsMissing);
AFF_DEFINE_ERROR(DegenerateScene);
AFF_DEFINE_ERROR(EmptyCloud);
AFF_DEFINE_ERROR(FrameMismatch);
AFF_DEFINE_ERROR(InvalidDims);
AFF_DEFINE_ERROR(FilterLargerThanGrid);
AFF_DEFINE_ERROR(WindowTooSmall);
AFF_DEFINE_ERROR(NoQualifyingPatches);
AFF_DEFINE_ERROR(ClusterCollapsed);
AFF_DEFINE_ERROR(DegenerateFit);
AFF_DEFINE_ERROR(NonFiniteLoss);
AFF_DEFINE_ERROR(ImageTooSmall);
AFF_DEFINE_ERROR(CameraInsideGeometry);
AFF_DEFINE_ERROR(NoPositives);
AFF_DEFINE_ERROR(IoError);

#undef AFF_DEFINE_ERROR

}  // namespace aff
