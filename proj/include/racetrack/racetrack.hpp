#pragma once

#include "racetrack/checks.hpp"
#include "racetrack/config.hpp"
#include "racetrack/dynamics.hpp"
#include "racetrack/equilibrium.hpp"
#include "racetrack/fourier.hpp"
#include "racetrack/geometry.hpp"
#include "racetrack/json_io.hpp"
#include "racetrack/matrix.hpp"
#include "racetrack/params.hpp"
#include "racetrack/population.hpp"
#include "racetrack/spectral.hpp"
