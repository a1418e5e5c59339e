#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roadrecon {

// Base class of every error raised by the library. `name()` is the stable
// identifier reported by the command-line tool.
class Error : public std::runtime_error {
 public:
  Error(std::string_view name, const std::string& message)
      : std::runtime_error(message), name_(name) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define ROADRECON_DEFINE_ERROR(ErrorName)                 \
  class ErrorName : public ::roadrecon::Error {           \
   public:                                                \
    explicit ErrorName(const std::string& message)        \
        : ::roadrecon::Error(#ErrorName, message) {}      \
  }

// geometry
ROADRECON_DEFINE_ERROR(InvalidArgumentError);
ROADRECON_DEFINE_ERROR(CheiralityError);
ROADRECON_DEFINE_ERROR(NoFootprintError);

// wigo
ROADRECON_DEFINE_ERROR(GaugeError);
ROADRECON_DEFINE_ERROR(DivergenceError);
ROADRECON_DEFINE_ERROR(OutOfRangeError);

// pairing
ROADRECON_DEFINE_ERROR(DegenerateError);

// sfm
ROADRECON_DEFINE_ERROR(LowParallaxError);
ROADRECON_DEFINE_ERROR(HighResidualError);
ROADRECON_DEFINE_ERROR(MissingRigError);
ROADRECON_DEFINE_ERROR(EmptyModelError);
ROADRECON_DEFINE_ERROR(DisjointModelsError);

// surface
ROADRECON_DEFINE_ERROR(EmptySurfaceError);
ROADRECON_DEFINE_ERROR(DegenerateExtentError);
ROADRECON_DEFINE_ERROR(NoCameraError);

// vectormap
ROADRECON_DEFINE_ERROR(OutOfBoundsError);

// evaluation
ROADRECON_DEFINE_ERROR(MissingInstanceError);
ROADRECON_DEFINE_ERROR(NoFramesError);

// synthetic
ROADRECON_DEFINE_ERROR(InvalidSpecError);

// io / cli
ROADRECON_DEFINE_ERROR(IoError);
ROADRECON_DEFINE_ERROR(ParseError);
ROADRECON_DEFINE_ERROR(ConfigError);

#undef ROADRECON_DEFINE_ERROR

}  // namespace roadrecon
