//! f64 math routed through std or libm depending on features.

macro_rules! shim {
    ($($name:ident => $libm:ident),* $(,)?) => {
        $(
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                #[cfg(feature = "std")]
                {
                    f64::$name(x)
                }
                #[cfg(not(feature = "std"))]
                {
                    libm::$libm(x)
                }
            }
        )*
    };
}

shim! {
    sqrt => sqrt,
    sin => sin,
    cos => cos,
    tan => tan,
    exp => exp,
    ln => log,
    abs => fabs,
    floor => floor,
}

#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}
