#include "landau/rng.hpp"

// header-only; this TU just anchors the target
