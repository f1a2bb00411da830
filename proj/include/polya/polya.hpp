#pragma once

#include "polya/error.hpp"
#include "polya/rng.hpp"
#include "polya/graph.hpp"
#include "polya/dynamics.hpp"
#include "polya/jacobian.hpp"
#include "polya/equilibrium.hpp"
#include "polya/spectral.hpp"
#include "polya/lyapunov.hpp"
#include "polya/inference.hpp"
#include "polya/montecarlo.hpp"
#include "polya/config.hpp"
#include "polya/io.hpp"
