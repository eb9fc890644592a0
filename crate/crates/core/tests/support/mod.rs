pub mod loopnest;
