#pragma once

#include "qcgym/agents.hpp"
#include "qcgym/core.hpp"
#include "qcgym/env.hpp"
#include "qcgym/formats.hpp"
#include "qcgym/initial_mapping.hpp"
#include "qcgym/oracles.hpp"
#include "qcgym/render.hpp"
#include "qcgym/rng.hpp"
#include "qcgym/routing.hpp"
#include "qcgym/scheduling.hpp"
