#pragma once

#include "jform/core.hpp"
#include "jform/decomp.hpp"
#include "jform/eigenprops.hpp"
#include "jform/io.hpp"
#include "jform/jspace.hpp"
#include "jform/matrep.hpp"
#include "jform/nullcone.hpp"
#include "jform/oracle.hpp"
#include "jform/spectral.hpp"
