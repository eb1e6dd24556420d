#include "common.hpp"

#ifndef WLIM_VERSION
#define WLIM_VERSION "0.1.0"
#endif
#ifndef WLIM_BUILD_REF
#define WLIM_BUILD_REF "unversioned"
#endif

namespace wlim {

const char* version_string() { return "wlim " WLIM_VERSION " (" WLIM_BUILD_REF ")"; }

}  // namespace wlim
