#pragma once

#include "ehrelay/errors.hpp"
#include "ehrelay/numerics.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/analytic.hpp"
#include "ehrelay/montecarlo.hpp"
#include "ehrelay/experiments.hpp"
#include "ehrelay/io/config_file.hpp"
#include "ehrelay/io/csv.hpp"
#include "ehrelay/io/svg.hpp"
#include "ehrelay/io/cli.hpp"
