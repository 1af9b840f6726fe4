#pragma once

#include "lzcross/rational.hpp"
#include "lzcross/indexsets.hpp"
#include "lzcross/quadrature.hpp"
#include "lzcross/norms.hpp"
#include "lzcross/fft.hpp"
#include "lzcross/spectral.hpp"
#include "lzcross/classes.hpp"
#include "lzcross/asymptotics.hpp"
