// Generated by `trigmv theta-gen --rust`; do not edit by hand.

/// tol = 4.8828125e-4
pub const THETA_HALF: [f64; 55] = [
    9.7592640668153763e-4,
    5.3059155611623124e-2,
    2.1446707482177041e-1,
    4.4794326288987102e-1,
    7.1693536212569442e-1,
    1.0028504543633519e0,
    1.2967736009430555e0,
    1.5944372389509649e0,
    1.8936216098653711e0,
    2.1932235583971984e0,
    2.4926241922782655e0,
    2.7915279339093408e0,
    3.0897705225194816e0,
    3.3872906156562941e0,
    3.6840631409795237e0,
    3.9801039429976743e0,
    4.2754315293218674e0,
    4.5700803817086584e0,
    4.8640875161394934e0,
    5.1574872835375505e0,
    5.4503175049219603e0,
    5.7426073711156569e0,
    6.0343956567144410e0,
    6.3257101652930281e0,
    6.6165835890394238e0,
    6.9070346750915572e0,
    7.1970962934578111e0,
    7.4867854965250649e0,
    7.7761225832364058e0,
    8.0651346671997626e0,
    8.3538333988676907e0,
    8.6422354705556650e0,
    8.9303653647869936e0,
    9.2182237551834483e0,
    9.5058320643952552e0,
    9.7932005145221304e0,
    1.0080346071130309e1,
    1.0367268482629852e1,
    1.0653988321778655e1,
    1.0940509749238256e1,
    1.1226846734106575e1,
    1.1513003360541054e1,
    1.1798987680458701e1,
    1.2084805108538088e1,
    1.2370466177838782e1,
    1.2655971661162331e1,
    1.2941335953955118e1,
    1.3226555836546790e1,
    1.3511650931746360e1,
    1.3796606033360900e1,
    1.4081446800002798e1,
    1.4366163377512073e1,
    1.4650761828762615e1,
    1.4935247252821750e1,
    1.5219633330138947e1,
];

/// tol = 1.1920928955078125e-7
pub const THETA_SINGLE: [f64; 55] = [
    2.3841835172788703e-7,
    8.4545935256333184e-4,
    1.4142790686551181e-2,
    6.0725957685514850e-2,
    1.4981645927382792e-1,
    2.7888565950217958e-1,
    4.4101489065535404e-1,
    6.2905568433710179e-1,
    8.3701408690434409e-1,
    1.0602315002887117e0,
    1.2951874029221773e0,
    1.5392460983886624e0,
    1.7904254264034845e0,
    2.0472302733807579e0,
    2.3085197009275404e0,
    2.5734150487138190e0,
    2.8412326667230037e0,
    3.1114393544221519e0,
    3.3836060133278063e0,
    3.6573978909866920e0,
    3.9325403907357241e0,
    4.2088096297435609e0,
    4.4860290146781523e0,
    4.7640431473189171e0,
    5.0427351146302470e0,
    5.3219953968130076e0,
    5.6017432111550249e0,
    5.8819058464430816e0,
    6.1624170640369016e0,
    6.4432314307213208e0,
    6.7243038679698834e0,
    7.0055923827789019e0,
    7.2870665494269034e0,
    7.5687004813503744e0,
    7.8504686289746770e0,
    8.1323504072758528e0,
    8.4143310405419136e0,
    8.6963869943293979e0,
    8.9785112556782583e0,
    9.2606886097374641e0,
    9.5429171468198319e0,
    9.8251751568121222e0,
    1.0107460610139231e1,
    1.0389769411860227e1,
    1.0672088722780710e1,
    1.0954422244808208e1,
    1.1236752027985103e1,
    1.1519091265092182e1,
    1.1801424404688200e1,
    1.2083747319334755e1,
    1.2366061478863994e1,
    1.2648367075376395e1,
    1.2930655097064445e1,
    1.3212930410120949e1,
    1.3495188884357336e1,
];

/// tol = 1.1102230246251565e-16
pub const THETA_DOUBLE: [f64; 55] = [
    2.2204460492503185e-16,
    2.5809543665595467e-8,
    1.3863477028405657e-5,
    3.3971662802290408e-4,
    2.4008751944974952e-3,
    9.0656517945062673e-3,
    2.3844545730008857e-2,
    4.9912275250201261e-2,
    8.9577529081109497e-2,
    1.4418296126546395e-1,
    2.1423570094995067e-1,
    2.9961585918250389e-1,
    3.9977730862654792e-1,
    5.1391426539504792e-1,
    6.4108312096907127e-1,
    7.8028669229997993e-1,
    9.3053245405859109e-1,
    1.0908636565427532e0,
    1.2603807642301188e0,
    1.4382520288209808e0,
    1.6237154867326549e0,
    1.8160772500124489e0,
    2.0147098318031560e0,
    2.2190477723661535e0,
    2.4285819205528005e0,
    2.6428522358567754e0,
    2.8614492709880990e0,
    3.0840003452920794e0,
    3.3101725427166535e0,
    3.5396653075748294e0,
    3.7722099024241569e0,
    4.0075599661439831e0,
    4.2454960292094421e0,
    4.4858189859315276e0,
    4.7283448002074673e0,
    4.9729149014307898e0,
    5.2193739515785733e0,
    5.4675889971509815e0,
    5.7174348239427593e0,
    5.9688015038009201e0,
    6.2215806569238019e0,
    6.4756806220893317e0,
    6.7310125615257146e0,
    6.9875003397863438e0,
    7.2450649150082187e0,
    7.5036429544794103e0,
    7.7631709547541163e0,
    8.0235927977311405e0,
    8.2848505728612665e0,
    8.5468976910386694e0,
    8.8096899815110454e0,
    9.0731852312335874e0,
    9.3373427649059089e0,
    9.6021230617205440e0,
    9.8674930187155425e0,
];
